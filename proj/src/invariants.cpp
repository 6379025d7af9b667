#include "bml/invariants.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>

namespace bml::invariants {

namespace {

std::size_t pow_sz(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

void decode(std::size_t flat, int base, int digits, int* out) {
  for (int k = digits - 1; k >= 0; --k) {
    out[k] = static_cast<int>(flat % base);
    flat /= base;
  }
}

}  // namespace

const MomentTensor& MomentSet::degree(int d) const {
  if (d < 1 || d > static_cast<int>(tensors.size()))
    throw MissingMoment("moment degree " + std::to_string(d) +
                        " not supplied");
  return tensors[static_cast<std::size_t>(d - 1)];
}

MomentSet moment_set_from_lambda(const LambdaMoment& lam1,
                                 const LambdaMoment& lam2) {
  if (lam1.t != 1 || lam2.t != 2 || lam1.n != lam2.n)
    throw DimensionMismatch();
  const int n = lam1.n;
  const int dim = 2 * n;
  MomentSet out;
  out.n = n;
  out.tensors.resize(4);
  for (int d = 1; d <= 4; ++d) {
    MomentTensor& t = out.tensors[d - 1];
    t.degree = d;
    t.n = n;
    t.entries = CVec::Zero(static_cast<Eigen::Index>(pow_sz(dim, d)));
  }
  // degree 2: lambda^(1) entries; degree 4: lambda^(2) in row-major
  // (rows are the first two indices); odd degrees vanish
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      out.tensors[1].entries(i * dim + j) = lam1.entries(i, j);
  const int dim2 = dim * dim;
  for (int r = 0; r < dim2; ++r)
    for (int c = 0; c < dim2; ++c)
      out.tensors[3].entries(static_cast<Eigen::Index>(r) * dim2 + c) =
          lam2.entries(r, c);
  return out;
}

MomentSet moment_set_from_truncated(const oracle::TruncatedState& psi) {
  const int n = psi.n;
  const int dim = 2 * n;
  MomentSet out;
  out.n = n;
  out.tensors.resize(4);
  for (int d = 1; d <= 4; ++d) {
    MomentTensor& t = out.tensors[d - 1];
    t.degree = d;
    t.n = n;
    const std::size_t size = pow_sz(dim, d);
    t.entries = CVec(static_cast<Eigen::Index>(size));
    std::vector<int> word(d);
    for (std::size_t flat = 0; flat < size; ++flat) {
      decode(flat, dim, d, word.data());
      t.entries(static_cast<Eigen::Index>(flat)) =
          oracle::moment_bruteforce_quad(psi, word);
    }
  }
  // these tensors are central only when first moments vanish
  if (out.tensors[0].entries.norm() > 1e-10)
    throw PreconditionViolated("state has nonzero first moments");
  return out;
}

MomentTensor transform_tensor(const SymplecticMatrix& s,
                              const MomentTensor& t) {
  if (s.n != t.n) throw DimensionMismatch();
  const int dim = 2 * t.n;
  const std::size_t size = static_cast<std::size_t>(t.entries.size());
  MomentTensor out = t;
  CVec cur = t.entries;
  CVec next(static_cast<Eigen::Index>(size));
  const CMat sc = s.entries.cast<cplx>();
  for (int axis = 0; axis < t.degree; ++axis) {
    std::size_t inner = pow_sz(dim, t.degree - 1 - axis);
    const std::size_t block = inner * static_cast<std::size_t>(dim);
    for (std::size_t outer = 0; outer < size; outer += block) {
      for (std::size_t in = 0; in < inner; ++in) {
        for (int i = 0; i < dim; ++i) {
          cplx acc = 0.0;
          for (int j = 0; j < dim; ++j)
            acc += sc(i, j) *
                   cur(static_cast<Eigen::Index>(
                       outer + static_cast<std::size_t>(j) * inner + in));
          next(static_cast<Eigen::Index>(
              outer + static_cast<std::size_t>(i) * inner + in)) = acc;
        }
      }
    }
    cur.swap(next);
  }
  out.entries = std::move(cur);
  return out;
}

MomentSet transform_moment_set(const SymplecticMatrix& s, const MomentSet& m) {
  MomentSet out;
  out.n = m.n;
  out.tensors.reserve(m.tensors.size());
  for (const auto& t : m.tensors) out.tensors.push_back(transform_tensor(s, t));
  return out;
}

MomentTensor gamma_tensor(const MomentSet& moments, std::span<const int> s) {
  if (s.empty()) throw MissingMoment("empty degree tuple");
  int total = 0;
  for (int d : s) {
    if (d < 1) throw MissingMoment("factor degrees must be positive");
    total += d;
  }
  if (total % 2 != 0) throw OddTotalDegree();
  if (total > kMaxTotalDegree) throw TooLarge("|s| capped at 8");

  const int n = moments.n;
  const int dim = 2 * n;
  MomentTensor out;
  out.degree = total;
  out.n = n;
  const std::size_t size = pow_sz(dim, total);
  out.entries = CVec(static_cast<Eigen::Index>(size));
  std::vector<int> digits(total);
  for (std::size_t flat = 0; flat < size; ++flat) {
    decode(flat, dim, total, digits.data());
    cplx prod = 1.0;
    int offset = 0;
    for (int d : s) {
      std::size_t sub = 0;
      for (int k = 0; k < d; ++k)
        sub = sub * static_cast<std::size_t>(dim) +
              static_cast<std::size_t>(digits[offset + k]);
      prod *= moments.degree(d).entries(static_cast<Eigen::Index>(sub));
      if (prod == cplx(0.0)) break;
      offset += d;
    }
    out.entries(static_cast<Eigen::Index>(flat)) = prod;
  }
  return out;
}

cplx theta_contraction(const MomentTensor& gamma, std::span<const int> pi) {
  if (gamma.degree % 2 != 0) throw OddTotalDegree();
  if (static_cast<int>(pi.size()) != gamma.degree) throw DegreeMismatch();
  const int dim = 2 * gamma.n;
  const Mat om = symplectic::omega(gamma.n);
  const std::size_t size = static_cast<std::size_t>(gamma.entries.size());
  std::vector<int> digits(gamma.degree);
  cplx total = 0.0;
  for (std::size_t flat = 0; flat < size; ++flat) {
    const cplx g = gamma.entries(static_cast<Eigen::Index>(flat));
    if (g == cplx(0.0)) continue;
    decode(flat, dim, gamma.degree, digits.data());
    double theta = 1.0;
    for (int a = 0; a < gamma.degree / 2; ++a) {
      theta *= om(digits[pi[2 * a]], digits[pi[2 * a + 1]]);
      if (theta == 0.0) break;
    }
    if (theta != 0.0) total += g * theta;
  }
  return total;
}

std::vector<cplx> eigen_invariants(const MomentTensor& gamma,
                                   std::span<const int> pi) {
  if (gamma.degree % 2 != 0) throw OddTotalDegree();
  const int m = gamma.degree / 2;
  if (static_cast<int>(pi.size()) != m) throw DegreeMismatch();
  const int dim = 2 * gamma.n;
  const std::size_t rows = pow_sz(dim, m);
  if (rows > 4096) throw TooLarge("eigen-invariant matrix capped at 4096");

  std::vector<int> pi_inv(m);
  for (int k = 0; k < m; ++k) pi_inv[pi[k]] = k;

  // (W_pi Gamma-bar)(r, c) = Gamma-bar(r', c), r'_l = r_{pi_inv(l)}
  CMat permuted(static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(rows));
  std::vector<int> rd(m), rp(m);
  for (std::size_t r = 0; r < rows; ++r) {
    decode(r, dim, m, rd.data());
    for (int l = 0; l < m; ++l) rp[l] = rd[pi_inv[l]];
    std::size_t rprime = 0;
    for (int l = 0; l < m; ++l)
      rprime = rprime * static_cast<std::size_t>(dim) +
               static_cast<std::size_t>(rp[l]);
    for (std::size_t c = 0; c < rows; ++c)
      permuted(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          gamma.entries(static_cast<Eigen::Index>(rprime * rows + c));
  }

  CMat iom = I_UNIT * symplectic::omega(gamma.n).cast<cplx>();
  CMat iom_kron = iom;
  for (int k = 1; k < m; ++k) iom_kron = kron(iom_kron, iom);

  Eigen::ComplexEigenSolver<CMat> es(CMat(iom_kron * permuted), false);
  std::vector<cplx> ev(es.eigenvalues().data(),
                       es.eigenvalues().data() + rows);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

double spectrum_distance(const std::vector<cplx>& a,
                         const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw DimensionMismatch();
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  Mat cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = std::abs(a[i] - b[j]);
  const std::vector<int> match = min_cost_assignment(cost);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, cost(i, match[i]));
  return worst;
}

namespace {

// compositions are canonicalized to descending part order; equal-degree
// factor blocks are interchangeable in the tensor product
std::vector<std::vector<int>> partitions(int total, int max_part) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int cap) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(remaining, cap); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, total, max_part);
  return out;
}

// positions of each factor block of s, grouped by equal degree
std::vector<std::vector<std::pair<int, int>>> equal_degree_blocks(
    const std::vector<int>& s) {
  std::vector<std::vector<std::pair<int, int>>> groups;
  int offset = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && s[i] == s[i - 1]) {
      groups.back().emplace_back(offset, s[i]);
    } else {
      groups.push_back({{offset, s[i]}});
    }
    offset += s[i];
  }
  return groups;
}

// all position permutations generated by permuting whole equal-degree
// blocks of Gamma
std::vector<std::vector<int>> block_symmetries(const std::vector<int>& s,
                                               int total) {
  const auto groups = equal_degree_blocks(s);
  std::vector<std::vector<int>> gammas;
  std::vector<int> identity(total);
  std::iota(identity.begin(), identity.end(), 0);
  gammas.push_back(identity);
  for (const auto& group : groups) {
    if (group.size() < 2) continue;
    const int count = static_cast<int>(group.size());
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<int>> extended;
    do {
      std::vector<int> perm(total);
      std::iota(perm.begin(), perm.end(), 0);
      for (int u = 0; u < count; ++u) {
        const auto [src_off, deg] = group[u];
        const auto [dst_off, deg2] = group[order[u]];
        for (int k = 0; k < deg; ++k) perm[src_off + k] = dst_off + k;
      }
      for (const auto& existing : gammas) {
        std::vector<int> composed(total);
        for (int k = 0; k < total; ++k) composed[k] = perm[existing[k]];
        extended.push_back(std::move(composed));
      }
    } while (std::next_permutation(order.begin(), order.end()));
    std::sort(extended.begin(), extended.end());
    extended.erase(std::unique(extended.begin(), extended.end()),
                   extended.end());
    gammas = std::move(extended);
  }
  return gammas;
}

// all domain permutations that reorder the theta pairs
std::vector<std::vector<int>> pair_symmetries(int total) {
  const int m = total / 2;
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<int>> betas;
  do {
    std::vector<int> beta(total);
    for (int a = 0; a < m; ++a) {
      beta[2 * a] = 2 * order[a];
      beta[2 * a + 1] = 2 * order[a] + 1;
    }
    betas.push_back(std::move(beta));
  } while (std::next_permutation(order.begin(), order.end()));
  return betas;
}

std::vector<int> canonical_contraction_perm(
    const std::vector<int>& pi, const std::vector<std::vector<int>>& gammas,
    const std::vector<std::vector<int>>& betas) {
  const int total = static_cast<int>(pi.size());
  std::vector<int> best = pi;
  std::vector<int> candidate(total);
  for (const auto& gamma : gammas) {
    for (const auto& beta : betas) {
      // value(pi) = value(gamma o pi o beta)
      for (int k = 0; k < total; ++k) candidate[k] = gamma[pi[beta[k]]];
      if (candidate < best) best = candidate;
    }
  }
  return best;
}

}  // namespace

std::vector<InvariantSpec> enumerate_specs(int budget) {
  if (budget > kMaxTotalDegree)
    throw TooLarge("spec budget capped at |s| = 8");
  std::vector<InvariantSpec> specs;
  for (int total = 2; total <= budget; total += 2) {
    for (const auto& s : partitions(total, std::min(4, total))) {
      const auto gammas = block_symmetries(s, total);
      const auto betas = pair_symmetries(total);

      std::set<std::vector<int>> seen;
      std::vector<int> pi(total);
      std::iota(pi.begin(), pi.end(), 0);
      do {
        const std::vector<int> canon =
            canonical_contraction_perm(pi, gammas, betas);
        if (seen.insert(canon).second) {
          InvariantSpec spec;
          spec.s = s;
          spec.pi = canon;
          spec.kind = InvariantKind::Contraction;
          specs.push_back(std::move(spec));
        }
      } while (std::next_permutation(pi.begin(), pi.end()));

      const int m = total / 2;
      std::vector<int> rowperm(m);
      std::iota(rowperm.begin(), rowperm.end(), 0);
      do {
        InvariantSpec spec;
        spec.s = s;
        spec.pi = rowperm;
        spec.kind = InvariantKind::Spectrum;
        specs.push_back(std::move(spec));
      } while (std::next_permutation(rowperm.begin(), rowperm.end()));
    }
  }
  return specs;
}

std::optional<WitnessReport> convertibility_witness(const MomentSet& a,
                                                    const MomentSet& b,
                                                    int budget) {
  if (a.n != b.n) throw DimensionMismatch();
  if (static_cast<int>(a.tensors.size()) < 4 ||
      static_cast<int>(b.tensors.size()) < 4)
    throw IncompleteMoments("moments up to degree 4 required");

  for (const InvariantSpec& spec : enumerate_specs(budget)) {
    const MomentTensor ga = gamma_tensor(a, spec.s);
    const MomentTensor gb = gamma_tensor(b, spec.s);
    WitnessReport report;
    report.spec = spec;
    double magnitude = 0.0;
    if (spec.kind == InvariantKind::Contraction) {
      report.value_a = theta_contraction(ga, spec.pi);
      report.value_b = theta_contraction(gb, spec.pi);
      report.gap = std::abs(report.value_a - report.value_b);
      magnitude = std::max(std::abs(report.value_a), std::abs(report.value_b));
    } else {
      report.spectrum_a = eigen_invariants(ga, spec.pi);
      report.spectrum_b = eigen_invariants(gb, spec.pi);
      report.gap = spectrum_distance(report.spectrum_a, report.spectrum_b);
      for (cplx z : report.spectrum_a) magnitude = std::max(magnitude, std::abs(z));
      for (cplx z : report.spectrum_b) magnitude = std::max(magnitude, std::abs(z));
    }
    if (report.gap > std::max(kTauWitAbs, kTauWitRel * magnitude))
      return report;
  }
  return std::nullopt;
}

}  // namespace bml::invariants
