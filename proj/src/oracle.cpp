#include "bml/oracle.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

namespace bml::oracle {

cplx permanent(const CMat& m) {
  const int dim = static_cast<int>(m.rows());
  if (m.cols() != dim) throw DimensionMismatch();
  if (dim > 24) throw TooLarge("permanent dimension capped at 24");
  if (dim == 0) return 1.0;

  CVec row_sums = CVec::Zero(dim);
  cplx total = 0.0;
  std::uint64_t prev_gray = 0;
  const std::uint64_t end = std::uint64_t{1} << dim;
  for (std::uint64_t k = 1; k < end; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t diff = gray ^ prev_gray;
    const int j = std::countr_zero(diff);
    if (gray & diff)
      row_sums += m.col(j);
    else
      row_sums -= m.col(j);
    prev_gray = gray;

    cplx prod = row_sums(0);
    for (int i = 1; i < dim; ++i) prod *= row_sums(i);
    total += (std::popcount(gray) & 1) ? -prod : prod;
  }
  return (dim & 1) ? -total : total;
}

cplx permanent_naive(const CMat& m) {
  const int dim = static_cast<int>(m.rows());
  if (m.cols() != dim) throw DimensionMismatch();
  if (dim > 10) throw TooLarge("naive permanent capped at 10");
  if (dim == 0) return 1.0;
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  cplx total = 0.0;
  do {
    cplx prod = 1.0;
    for (int i = 0; i < dim; ++i) prod *= m(i, perm[i]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

cplx passive_fock_overlap(const PassiveUnitary& w, const FockVector& f,
                          const FockVector& g) {
  if (f.modes() != w.n || g.modes() != w.n) throw DimensionMismatch();
  if (f.total() != g.total()) throw PhotonNumberMismatch();
  const int photons = f.total();
  if (photons > 20) throw TooManyPhotons();
  if (photons == 0) return 1.0;

  std::vector<int> rows, cols;
  rows.reserve(photons);
  cols.reserve(photons);
  double fact = 1.0;
  for (int i = 0; i < f.modes(); ++i) {
    for (int k = 0; k < f.occ[i]; ++k) {
      rows.push_back(i);
      fact *= k + 1;
    }
    for (int k = 0; k < g.occ[i]; ++k) {
      cols.push_back(i);
      fact *= k + 1;
    }
  }
  CMat sub(photons, photons);
  for (int r = 0; r < photons; ++r)
    for (int c = 0; c < photons; ++c) sub(r, c) = w.entries(rows[r], cols[c]);
  return permanent(sub) / std::sqrt(fact);
}

PermCheckResult perm_perturbation_check(int b, int n, double eps,
                                        std::uint64_t seed) {
  if (b < 1 || n < 1 || b * n > 8) throw PreconditionViolated("b*n <= 8");
  if (eps < 0.0 || eps >= 1.0 / (b * n))
    throw PreconditionViolated("eps must satisfy 0 <= eps < 1/(bn)");
  const int dim = b * n;
  Rng rng(seed);
  CMat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      m(i, j) = ((i % n) == (j % n) ? 1.0 : 0.0) +
                eps * rng.uniform(-1.0, 1.0);
  double norm = 1.0;
  for (int k = 2; k <= b; ++k) norm *= std::pow(static_cast<double>(k), n);
  PermCheckResult out;
  out.lhs = permanent(m).real() / norm;
  const double x = eps * b * n;
  out.rhs = 1.0 - x / (1.0 - x);
  out.holds = out.lhs >= out.rhs;
  return out;
}

std::size_t TruncatedState::index_of(const FockVector& f) const {
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    if (f.occ[i] >= cutoff) throw CutoffTooSmall();
    idx = idx * cutoff + static_cast<std::size_t>(f.occ[i]);
  }
  return idx;
}

double TruncatedState::leakage() const {
  const double total = amplitudes.squaredNorm();
  if (total == 0.0) return 0.0;
  double worst = 0.0;
  const std::size_t size = static_cast<std::size_t>(amplitudes.size());
  for (int m = 0; m < n; ++m) {
    std::size_t stride = 1;
    for (int k = m + 1; k < n; ++k) stride *= cutoff;
    double mass = 0.0;
    for (std::size_t idx = 0; idx < size; ++idx) {
      const int level = static_cast<int>((idx / stride) % cutoff);
      if (level >= cutoff - 2) mass += std::norm(amplitudes(idx));
    }
    worst = std::max(worst, mass / total);
  }
  return worst;
}

TruncatedState truncated_fock(const FockVector& f, int cutoff) {
  TruncatedState psi;
  psi.n = f.modes();
  psi.cutoff = cutoff;
  std::size_t size = 1;
  for (int i = 0; i < psi.n; ++i) size *= cutoff;
  psi.amplitudes = CVec::Zero(static_cast<Eigen::Index>(size));
  psi.amplitudes(static_cast<Eigen::Index>(psi.index_of(f))) = 1.0;
  return psi;
}

TruncatedState truncated_superposition(std::span<const SuperpositionTerm> terms,
                                       int n, int cutoff) {
  TruncatedState psi;
  psi.n = n;
  psi.cutoff = cutoff;
  std::size_t size = 1;
  for (int i = 0; i < n; ++i) size *= cutoff;
  psi.amplitudes = CVec::Zero(static_cast<Eigen::Index>(size));
  for (const auto& term : terms) {
    if (term.occ.modes() != n) throw DimensionMismatch();
    psi.amplitudes(static_cast<Eigen::Index>(psi.index_of(term.occ))) +=
        term.amp;
  }
  const double norm = psi.amplitudes.norm();
  if (norm == 0.0) throw PreconditionViolated("empty superposition");
  psi.amplitudes /= norm;
  return psi;
}

namespace {

CMat annihilation_matrix(int cutoff) {
  CMat a = CMat::Zero(cutoff, cutoff);
  for (int l = 1; l < cutoff; ++l) a(l - 1, l) = std::sqrt(double(l));
  return a;
}

// contract a single-mode operator along one tensor axis
void apply_mode_op(CVec& amps, int n, int cutoff, int mode, const CMat& op) {
  std::size_t stride = 1;
  for (int k = mode + 1; k < n; ++k) stride *= cutoff;
  const std::size_t block = stride * static_cast<std::size_t>(cutoff);
  const std::size_t size = static_cast<std::size_t>(amps.size());
  CVec scratch(cutoff);
  for (std::size_t outer = 0; outer < size; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      for (int l = 0; l < cutoff; ++l)
        scratch(l) = amps(outer + static_cast<std::size_t>(l) * stride + inner);
      const CVec mixed = op * scratch;
      for (int l = 0; l < cutoff; ++l)
        amps(outer + static_cast<std::size_t>(l) * stride + inner) = mixed(l);
    }
  }
}

// absolute amplitude mass on the top two levels of any mode
double top_level_mass(const TruncatedState& psi) {
  double worst = 0.0;
  const std::size_t size = static_cast<std::size_t>(psi.amplitudes.size());
  for (int m = 0; m < psi.n; ++m) {
    std::size_t stride = 1;
    for (int k = m + 1; k < psi.n; ++k) stride *= psi.cutoff;
    double mass = 0.0;
    for (std::size_t idx = 0; idx < size; ++idx) {
      const int level = static_cast<int>((idx / stride) % psi.cutoff);
      if (level >= psi.cutoff - 2) mass += std::norm(psi.amplitudes(idx));
    }
    worst = std::max(worst, mass);
  }
  return worst;
}

// Each ladder application can legitimately amplify the relative
// boundary mass by an O(cutoff) factor, so intermediate vectors get one
// such factor per applied operator, capped so the guard keeps catching
// grossly contaminated chains. Mass is judged against the largest norm
// the chain has reached: a word that annihilates the state down to
// roundoff must not trip the guard.
void check_leak(const TruncatedState& psi, double scale, int ops_applied) {
  double allowance = kLeakTol;
  for (int k = 0; k <= ops_applied; ++k) allowance *= psi.cutoff;
  allowance = std::min(allowance, 1e-4);
  if (top_level_mass(psi) > allowance * scale) throw CutoffTooSmall();
}

void check_input_leak(const TruncatedState& psi) {
  if (psi.leakage() > kLeakTol) throw CutoffTooSmall();
}

CMat embed_mode_op(int n, int cutoff, int mode, const CMat& op) {
  std::size_t left = 1, right = 1;
  for (int k = 0; k < mode; ++k) left *= cutoff;
  for (int k = mode + 1; k < n; ++k) right *= cutoff;
  const CMat eye_l = CMat::Identity(static_cast<Eigen::Index>(left),
                                    static_cast<Eigen::Index>(left));
  const CMat eye_r = CMat::Identity(static_cast<Eigen::Index>(right),
                                    static_cast<Eigen::Index>(right));
  return kron(kron(eye_l, op), eye_r);
}

}  // namespace

CMat passive_unitary_truncated(const PassiveUnitary& w, int cutoff) {
  const int n = w.n;
  // Hermitian single-particle generator G = -i log W
  Eigen::ComplexSchur<CMat> schur(w.entries);
  CVec theta(n);
  for (int j = 0; j < n; ++j) theta(j) = std::arg(schur.matrixT()(j, j));
  CMat g = schur.matrixU() * theta.asDiagonal() * schur.matrixU().adjoint();
  g = 0.5 * (g + CMat(g.adjoint()));

  std::size_t size = 1;
  for (int i = 0; i < n; ++i) size *= cutoff;
  const Eigen::Index dim = static_cast<Eigen::Index>(size);

  // second-quantized generator sum_jk G_jk adag_j a_k on the truncated space
  CMat h = CMat::Zero(dim, dim);
  std::vector<int> occ(n);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rem = idx;
    for (int m = n - 1; m >= 0; --m) {
      occ[m] = static_cast<int>(rem % cutoff);
      rem /= cutoff;
    }
    for (int k = 0; k < n; ++k) {
      if (occ[k] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == k) {
          h(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) +=
              g(j, k) * static_cast<double>(occ[k]);
          continue;
        }
        if (occ[j] + 1 >= cutoff) continue;
        std::size_t stride_j = 1, stride_k = 1;
        for (int t = j + 1; t < n; ++t) stride_j *= cutoff;
        for (int t = k + 1; t < n; ++t) stride_k *= cutoff;
        const std::size_t tgt = idx + stride_j - stride_k;
        const double coeff =
            std::sqrt(double(occ[k])) * std::sqrt(double(occ[j] + 1));
        h(static_cast<Eigen::Index>(tgt), static_cast<Eigen::Index>(idx)) +=
            g(j, k) * coeff;
      }
    }
  }
  h = 0.5 * (h + CMat(h.adjoint()));

  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  CVec phase(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    phase(i) = std::exp(I_UNIT * es.eigenvalues()(i));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// exp((s/2)(adag^2 - a^2)) on one mode via the Hermitian companion of
// the antisymmetric generator
CMat squeeze_unitary_truncated(double s, int cutoff) {
  const CMat a = annihilation_matrix(cutoff);
  const CMat k = a.adjoint() * a.adjoint() - a * a;
  CMat ik = I_UNIT * k;
  ik = 0.5 * (ik + CMat(ik.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> es(ik);
  CVec phase(cutoff);
  for (int i = 0; i < cutoff; ++i)
    phase(i) = std::exp(-I_UNIT * (0.5 * s) * es.eigenvalues()(i));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CMat gaussian_unitary_truncated(const SymplecticMatrix& s, int cutoff) {
  const auto factors = symplectic::euler(s);
  const PassiveUnitary w_left = symplectic::passive_extract(factors.o);
  const PassiveUnitary w_right = symplectic::passive_extract(factors.v);

  CMat u = passive_unitary_truncated(w_right, cutoff);
  for (int m = 0; m < s.n; ++m) {
    const double sq = factors.squeezings(m);
    if (sq == 0.0) continue;
    const CMat um = squeeze_unitary_truncated(sq, cutoff);
    u = embed_mode_op(s.n, cutoff, m, um) * u;
  }
  u = passive_unitary_truncated(w_left, cutoff) * u;
  return u;
}

TruncatedState evolve(const CMat& u, const TruncatedState& psi) {
  if (u.cols() != psi.amplitudes.size()) throw DimensionMismatch();
  TruncatedState out = psi;
  out.amplitudes = u * psi.amplitudes;
  return out;
}

cplx moment_bruteforce(const TruncatedState& psi,
                       std::span<const LadderOp> word) {
  if (word.size() > 4) throw WordTooLong();
  check_input_leak(psi);
  double scale = psi.amplitudes.squaredNorm();
  const CMat a = annihilation_matrix(psi.cutoff);
  const CMat adag = a.adjoint();
  TruncatedState cur = psi;
  int ops_applied = 0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (it->mode < 0 || it->mode >= psi.n) throw DimensionMismatch();
    apply_mode_op(cur.amplitudes, psi.n, psi.cutoff, it->mode,
                  it->dag ? adag : a);
    scale = std::max(scale, cur.amplitudes.squaredNorm());
    check_leak(cur, scale, ops_applied++);
  }
  return psi.amplitudes.dot(cur.amplitudes);
}

cplx moment_bruteforce_quad(const TruncatedState& psi,
                            std::span<const int> quad_word) {
  if (quad_word.size() > 4) throw WordTooLong();
  check_input_leak(psi);
  double scale = psi.amplitudes.squaredNorm();
  const CMat a = annihilation_matrix(psi.cutoff);
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  const CMat x = (a + a.adjoint()) * inv_root2;
  const CMat p = I_UNIT * (a.adjoint() - a) * inv_root2;
  TruncatedState cur = psi;
  int ops_applied = 0;
  for (auto it = quad_word.rbegin(); it != quad_word.rend(); ++it) {
    const int idx = *it;
    if (idx < 0 || idx >= 2 * psi.n) throw DimensionMismatch();
    apply_mode_op(cur.amplitudes, psi.n, psi.cutoff, idx % psi.n,
                  idx < psi.n ? x : p);
    scale = std::max(scale, cur.amplitudes.squaredNorm());
    check_leak(cur, scale, ops_applied++);
  }
  return psi.amplitudes.dot(cur.amplitudes);
}

}  // namespace bml::oracle
