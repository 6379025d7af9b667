#include "bml/learner.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bml::learner {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964091736687747;

void require_hermitian(const CMat& m) {
  if (m.rows() != m.cols()) throw NonHermitianInput();
  if (operator_norm(CMat(m - m.adjoint())) >
      1e-8 * (1.0 + operator_norm(m)))
    throw NonHermitianInput();
}

// round with rejection of values too close to a half-integer boundary
int round_occupation(double value) {
  const double frac = value - std::floor(value);
  if (std::abs(frac - 0.5) < kTauRound) throw RoundingAmbiguous();
  return static_cast<int>(std::lround(value));
}

CMat swap_operator(int n) {
  CMat s = CMat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i * n + j, j * n + i) = 1.0;
  return s;
}

// rotate each column so its largest-magnitude entry is real positive
void canonicalize_phases(CMat& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index top = 0;
    u.col(c).cwiseAbs().maxCoeff(&top);
    const cplx val = u(top, c);
    if (std::abs(val) > 0.0) u.col(c) *= std::conj(val) / std::abs(val);
  }
}

cplx unit_phase(cplx z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : cplx(1.0);
}

// shared alignment search: `overlap(i, j)` scores reference column i
// against candidate column j, `residual(m)` evaluates a full matching
template <typename OverlapFn, typename ResidualFn>
AlignmentReport align_search(int n, OverlapFn&& overlap,
                             ResidualFn&& residual) {
  AlignmentReport best;
  best.residual = std::numeric_limits<double>::infinity();
  if (n <= 8) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    do {
      const double r = residual(m);
      if (r < best.residual) {
        best.residual = r;
        best.p = m;
      }
    } while (std::next_permutation(m.begin(), m.end()));
  } else {
    Mat cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = -std::abs(overlap(i, j));
    // assignment[reference] = candidate; p maps the other way
    const std::vector<int> ref_to_cand = min_cost_assignment(cost);
    best.p.assign(n, -1);
    for (int i = 0; i < n; ++i) best.p[ref_to_cand[i]] = i;
    best.residual = residual(best.p);
  }
  best.phi = CVec::Ones(n);
  for (int j = 0; j < n; ++j)
    best.phi(best.p[j]) = unit_phase(overlap(best.p[j], j));
  return best;
}

}  // namespace

PassiveUnitary find_v(const SigmaMoment& sigma2, int b, Diagnostics* diag) {
  if (b < 0) throw PreconditionViolated("b must be >= 0");
  const int n = sigma2.n;
  if (sigma2.t != 2 || sigma2.entries.rows() != n * n)
    throw DimensionMismatch();
  require_hermitian(sigma2.entries);
  if (b == 0) return symplectic::make_passive(CMat::Identity(n, n));

  const double scale = static_cast<double>(b) * (b + 1);
  CMat a = (static_cast<double>((b + 1) * (b + 1)) *
                (CMat::Identity(n * n, n * n) + swap_operator(n)) -
            sigma2.entries) /
           scale;
  a = 0.5 * (a + CMat(a.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> es(a);

  if (diag) {
    diag->eigenvalue_gaps.clear();
    for (int i = 0; i < std::min(n + 1, n * n - 1); ++i) {
      const int top = n * n - 1 - i;
      diag->eigenvalue_gaps.push_back(es.eigenvalues()(top) -
                                      es.eigenvalues()(top - 1));
    }
  }

  // Projected tensor-power refinement. The top-n eigenspace of A is
  // spanned by the product vectors w_j (x) w_j; the map
  //   u  <-  mat(P vec(u u^T)) conj(u)
  // sends the overlap coefficients c_j = <w_j|u> to |c_j|^2 c_j, so a
  // candidate contracts onto the dominant w_j. SVD-harvested columns
  // alone can miss the recovery bound when Schmidt coefficients are
  // nearly degenerate (the singular basis rotates freely); refining
  // each candidate inside the measured eigenspace restores it.
  const CMat top_space = es.eigenvectors().rightCols(n);
  const auto refine = [&](CVec u) {
    for (int iter = 0; iter < 60; ++iter) {
      CVec lifted(n * n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) lifted(r * n + c) = u(r) * u(c);
      const CVec projected = top_space * (top_space.adjoint() * lifted);
      CVec next(n);
      for (int r = 0; r < n; ++r) {
        cplx acc = 0.0;
        for (int c = 0; c < n; ++c)
          acc += projected(r * n + c) * std::conj(u(c));
        next(r) = acc;
      }
      const double norm = next.norm();
      if (norm < 1e-14) break;
      next /= norm;
      const cplx phase = unit_phase(next.dot(u));
      const double step = (next * phase - u).norm();
      u = next;
      if (step < 1e-15) break;
    }
    return u;
  };

  // Candidates are harvested from a pool of top eigenvectors and
  // accepted greedily by Schmidt coefficient: a column extracted where
  // its coefficient is large is stable under noise, while coefficients
  // that are small (or nearly degenerate within one eigenvector) carry
  // an unstable Schmidt basis.
  struct Candidate {
    double coeff;
    int eigvec;
    int slot;
    CVec column;
  };
  std::vector<CVec> columns;
  std::vector<CVec> basis;  // orthonormalized accepted columns
  std::vector<Candidate> candidates;
  int pool_begin = 0;
  for (int pool_end : {n, std::min(2 * n, n * n)}) {
    for (int i = pool_begin; i < pool_end; ++i) {
      const CVec vec = es.eigenvectors().col(n * n - 1 - i);
      CMat reshaped(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) reshaped(r, c) = vec(r * n + c);
      Eigen::JacobiSVD<CMat> svd(reshaped, Eigen::ComputeFullU);
      if (diag) {
        std::vector<double> spectrum(svd.singularValues().data(),
                                     svd.singularValues().data() + n);
        diag->schmidt_spectra.push_back(std::move(spectrum));
      }
      for (int k = 0; k < n; ++k) {
        if (svd.singularValues()(k) < kTauSchmidt) break;
        candidates.push_back(
            {svd.singularValues()(k), i, k, svd.matrixU().col(k)});
      }
    }
    pool_begin = pool_end;

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       if (a.coeff != b.coeff) return a.coeff > b.coeff;
                       if (a.eigvec != b.eigvec) return a.eigvec < b.eigvec;
                       return a.slot < b.slot;
                     });
    for (const Candidate& cand : candidates) {
      const CVec refined = refine(cand.column);
      CVec resid = refined;
      for (const CVec& q : basis) resid -= q.dot(refined) * q;
      if (resid.norm() > kTauRank) {
        columns.push_back(refined);
        basis.push_back(resid.normalized());
        if (static_cast<int>(columns.size()) == n) break;
      }
    }
    if (static_cast<int>(columns.size()) == n) break;
    // stall: widen the pool and retry with the extended candidate set
    columns.clear();
    basis.clear();
  }
  if (static_cast<int>(columns.size()) < n)
    throw InsufficientColumns(
        "cannot assemble a full unitary; noise too large or wrong b");

  CMat assembled(n, n);
  for (int j = 0; j < n; ++j) assembled.col(j) = columns[j];
  Eigen::JacobiSVD<CMat> polar(assembled,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMat v = polar.matrixU() * polar.matrixV().adjoint();
  if (diag)
    diag->polar_correction_norm =
        std::max(diag->polar_correction_norm, operator_norm(CMat(assembled - v)));
  return symplectic::make_passive(v);
}

LearnResultPassive find_v_fock(const SigmaMoment& sigma1,
                               const SigmaMoment& sigma2) {
  const int n = sigma1.n;
  if (sigma1.t != 1 || sigma1.entries.rows() != n) throw DimensionMismatch();
  if (sigma2.t != 2 || sigma2.n != n || sigma2.entries.rows() != n * n)
    throw DimensionMismatch();
  require_hermitian(sigma1.entries);
  require_hermitian(sigma2.entries);

  CMat pw = sigma1.entries - CMat::Identity(n, n);
  pw = 0.5 * (pw + CMat(pw.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> es(pw);  // eigenvalues ascending

  std::vector<int> g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = round_occupation(es.eigenvalues()(i));
    if (g[i] < 0) throw NegativeOccupation();
  }

  CMat u = es.eigenvectors();
  canonicalize_phases(u);

  const CMat uk = kron(u, u);
  const CMat tilde = uk.adjoint() * sigma2.entries * uk;

  LearnResultPassive out;
  CMat x = CMat::Identity(n, n);
  int begin = 0;
  while (begin < n) {
    int end = begin;
    while (end < n && g[end] == g[begin]) ++end;
    out.block_partition.emplace_back(begin, end);
    const int len = end - begin;
    if (g[begin] > 0) {
      SigmaMoment block;
      block.t = 2;
      block.n = len;
      block.entries = CMat(len * len, len * len);
      for (int a = 0; a < len; ++a)
        for (int b = 0; b < len; ++b)
          for (int c = 0; c < len; ++c)
            for (int d = 0; d < len; ++d)
              block.entries(a * len + b, c * len + d) =
                  tilde((begin + a) * n + (begin + b),
                        (begin + c) * n + (begin + d));
      const PassiveUnitary vb = find_v(block, g[begin], &out.diagnostics);
      x.block(begin, begin, len, len) = vb.entries;
    }
    begin = end;
  }

  out.v = symplectic::make_passive(CMat(u * x));
  out.g = FockVector(std::move(g));
  return out;
}

LearnResultActive find_q(const LambdaMoment& lambda1,
                         const LambdaMoment& lambda2) {
  const int n = lambda1.n;
  if (lambda1.t != 1 || lambda1.entries.rows() != 2 * n)
    throw DimensionMismatch();
  if (lambda2.t != 2 || lambda2.n != n ||
      lambda2.entries.rows() != 4 * n * n)
    throw DimensionMismatch();

  Mat cov = lambda1.entries.real();
  cov = 0.5 * (cov + Mat(cov.transpose()));
  const auto wil = symplectic::williamson(cov);
  if (wil.nu.minCoeff() < 0.5 - kCovarianceSlack) throw NotACovariance();

  std::vector<int> g(n);
  LearnResultActive out;
  for (int i = 0; i < n; ++i) {
    g[i] = round_occupation(wil.nu(i) - 0.5);
    if (g[i] < 0) g[i] = 0;  // slack below the vacuum value rounds to 0
    out.diagnostics.nu_residuals.push_back(
        std::abs(wil.nu(i) - (g[i] + 0.5)));
  }

  const Mat r_inv = symplectic::symplectic_inverse(wil.r.entries);
  const auto r_inv_sym = symplectic::make_symplectic(r_inv);
  const LambdaMoment t1 = moments::transform_lambda(r_inv_sym, lambda1);
  const LambdaMoment t2 = moments::transform_lambda(r_inv_sym, lambda2);
  auto [s1, s2] = moments::lambda_to_sigma(t1, t2);

  LearnResultPassive passive = find_v_fock(s1, s2);
  out.diagnostics.eigenvalue_gaps = passive.diagnostics.eigenvalue_gaps;
  out.diagnostics.schmidt_spectra = passive.diagnostics.schmidt_spectra;
  out.diagnostics.polar_correction_norm =
      passive.diagnostics.polar_correction_norm;

  const Mat o = symplectic::passive_embed(passive.v).entries;
  out.q = symplectic::make_symplectic(Mat(wil.r.entries * o));
  out.r = wil.r;
  out.g = FockVector(std::move(g));
  return out;
}

AlignmentReport align_unitary(const PassiveUnitary& v, const PassiveUnitary& w,
                              const FockVector& g) {
  if (v.n != w.n) throw DimensionMismatch();
  (void)g;  // block structure is recovered by the search itself
  const int n = v.n;
  CMat ip(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ip(i, j) = w.entries.col(i).dot(v.entries.col(j));

  auto overlap = [&](int i, int j) { return ip(i, j); };
  auto residual = [&](const std::vector<int>& m) {
    CMat d = v.entries;
    for (int j = 0; j < n; ++j)
      d.col(j) -= unit_phase(ip(m[j], j)) * w.entries.col(m[j]);
    return operator_norm(d);
  };
  return align_search(n, overlap, residual);
}

AlignmentReport align_symplectic(const SymplecticMatrix& q,
                                 const SymplecticMatrix& s,
                                 const FockVector& g) {
  if (q.n != s.n) throw DimensionMismatch();
  (void)g;
  const int n = q.n;
  const Mat d = symplectic::symplectic_inverse(s.entries) * q.entries;
  // complex unitary candidate hiding in the 2x2 mode sub-blocks
  CMat c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c(i, j) = 0.5 * cplx(d(i, j) + d(n + i, n + j),
                           d(n + i, j) - d(i, n + j));

  auto overlap = [&](int i, int j) { return c(i, j); };
  auto residual = [&](const std::vector<int>& m) {
    CMat phase_perm = CMat::Zero(n, n);
    for (int j = 0; j < n; ++j) phase_perm(m[j], j) = unit_phase(c(m[j], j));
    PassiveUnitary pp;
    pp.n = n;
    pp.entries = phase_perm;
    const Mat aligned = s.entries * symplectic::passive_embed(pp).entries;
    return operator_norm(Mat(q.entries - aligned));
  };
  return align_search(n, overlap, residual);
}

double bound_constant_fock(double eps, int n, int b) {
  return 4.0 * kSqrt5 * eps * n / (static_cast<double>(b) * (b + 1));
}

bool fidelity_bound_applicable(double eps, int n, int b) {
  return eps <= (b + 1) / (4.0 * kSqrt5 * n * n);
}

double fidelity_bound_constant_fock(double eps, int n, int b) {
  const double x = 4.0 * kSqrt5 * eps * n * n / (b + 1);
  return 1.0 - x / (1.0 - x);
}

double bound_mixed_fock(double eps1, double eps2, int n, int f_max) {
  const double poly = 3.0 * f_max * f_max + 5.0 * f_max + 2.0;
  return eps1 * (32.0 * kSqrt5 * n * n * poly + 4.0 * n) +
         2.0 * kSqrt5 * eps2 * n;
}

double fidelity_bound_mixed_fock(double eps1, double eps2, int n, int f_max) {
  const double gamma = bound_mixed_fock(eps1, eps2, n, f_max);
  const double x = gamma * f_max * n;
  return 1.0 - x / (1.0 - x);
}

}  // namespace bml::learner
