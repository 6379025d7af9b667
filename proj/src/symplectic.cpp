#include "bml/symplectic.hpp"

#include <algorithm>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bml::symplectic {

Mat omega(int n) {
  Mat o = Mat::Zero(2 * n, 2 * n);
  o.topRightCorner(n, n) = Mat::Identity(n, n);
  o.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return o;
}

bool is_symplectic(const Mat& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) return false;
  const int n = static_cast<int>(s.rows()) / 2;
  const Mat o = omega(n);
  return operator_norm(Mat(s * o * s.transpose() - o)) <=
         tol_sym(operator_norm(s));
}

bool is_orthogonal_symplectic(const Mat& s) {
  if (!is_symplectic(s)) return false;
  return operator_norm(Mat(s.transpose() * s -
                           Mat::Identity(s.rows(), s.cols()))) <=
         tol_sym(operator_norm(s));
}

SymplecticMatrix make_symplectic(Mat entries) {
  if (!is_symplectic(entries)) throw NotSymplectic();
  SymplecticMatrix s;
  s.n = static_cast<int>(entries.rows()) / 2;
  s.s_max = std::log(operator_norm(entries));
  s.entries = std::move(entries);
  return s;
}

PassiveUnitary make_passive(CMat entries) {
  if (entries.rows() != entries.cols()) throw NonUnitaryInput();
  const CMat defect = entries.adjoint() * entries -
                      CMat::Identity(entries.rows(), entries.cols());
  if (operator_norm(defect) > tol_sym(operator_norm(entries)))
    throw NonUnitaryInput();
  PassiveUnitary w;
  w.n = static_cast<int>(entries.rows());
  w.entries = std::move(entries);
  return w;
}

SymplecticMatrix passive_embed(const PassiveUnitary& w) {
  const int n = w.n;
  Mat s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = w.entries.real();
  s.topRightCorner(n, n) = -w.entries.imag();
  s.bottomLeftCorner(n, n) = w.entries.imag();
  s.bottomRightCorner(n, n) = w.entries.real();
  SymplecticMatrix out;
  out.n = n;
  out.entries = std::move(s);
  out.s_max = 0.0;
  return out;
}

PassiveUnitary passive_extract(const SymplecticMatrix& o) {
  if (!is_orthogonal_symplectic(o.entries)) throw NotSymplectic();
  const int n = o.n;
  CMat w = o.entries.topLeftCorner(n, n).cast<cplx>() +
           I_UNIT * o.entries.bottomLeftCorner(n, n).cast<cplx>();
  return make_passive(std::move(w));
}

Mat symplectic_inverse(const Mat& s) {
  const int n = static_cast<int>(s.rows()) / 2;
  const Mat o = omega(n);
  return -o * s.transpose() * o;
}

PassiveUnitary random_passive(int n, std::uint64_t seed) {
  Rng rng(seed);
  CMat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = rng.cgauss() / std::sqrt(2.0);
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= (d == cplx(0.0) ? cplx(1.0) : d / std::abs(d));
  }
  PassiveUnitary w;
  w.n = n;
  w.entries = std::move(q);
  return w;
}

SymplecticMatrix random_symplectic(int n, double s_max, std::uint64_t seed) {
  const PassiveUnitary u1 = random_passive(n, mix_seed(seed, 1));
  const PassiveUnitary u2 = random_passive(n, mix_seed(seed, 2));
  Rng rng(mix_seed(seed, 3));
  Vec s(2 * n);
  for (int i = 0; i < n; ++i) {
    const double si = rng.uniform(-s_max, s_max);
    s(i) = std::exp(si);
    s(n + i) = std::exp(-si);
  }
  Mat entries = passive_embed(u1).entries * s.asDiagonal() *
                passive_embed(u2).entries;
  return make_symplectic(std::move(entries));
}

namespace {

// One Newton step toward the symplectic manifold:
// X <- (X - Omega X^-T Omega) / 2. Fixed points are symplectic.
Mat symplectic_newton_step(const Mat& x) {
  const int n = static_cast<int>(x.rows()) / 2;
  const Mat o = omega(n);
  return 0.5 * (x - o * x.inverse().transpose() * o);
}

}  // namespace

WilliamsonResult williamson(const Mat& m) {
  const int dim = static_cast<int>(m.rows());
  if (dim % 2 != 0 || m.cols() != dim) throw NotSymmetric();
  const int n = dim / 2;
  const double scale = operator_norm(m);
  if (operator_norm(Mat(m - m.transpose())) > tol_sym(scale))
    throw NotSymmetric();

  const Mat msym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(msym);
  if (es.eigenvalues()(0) <= 0.0) throw NotPositiveDefinite();

  const Vec sqrt_ev = es.eigenvalues().cwiseSqrt();
  const Mat m_half = es.eigenvectors() * sqrt_ev.asDiagonal() *
                     es.eigenvectors().transpose();

  // Hermitian companion of the antisymmetric matrix M^1/2 Omega M^1/2;
  // its spectrum is {-nu, +nu}, the symplectic eigenvalues of M.
  const Mat b = m_half * omega(n) * m_half;
  CMat h = I_UNIT * b.cast<cplx>();
  h = 0.5 * (h + CMat(h.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> hes(h);

  Vec nu(n);
  Mat k(2 * n, 2 * n);
  const double root2 = std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    // positive-eigenvalue vectors sit in the top half, ascending
    nu(j) = hes.eigenvalues()(n + j);
    const CVec v = hes.eigenvectors().col(n + j);
    k.col(j) = root2 * v.imag();
    k.col(n + j) = root2 * v.real();
  }

  Vec inv_sqrt_nu(2 * n);
  for (int j = 0; j < n; ++j) {
    inv_sqrt_nu(j) = 1.0 / std::sqrt(nu(j));
    inv_sqrt_nu(n + j) = inv_sqrt_nu(j);
  }
  Mat r = m_half * k * inv_sqrt_nu.asDiagonal();

  const Mat o = omega(n);
  if (operator_norm(Mat(r * o * r.transpose() - o)) >
      tol_sym(operator_norm(r))) {
    r = symplectic_newton_step(r);
  }

  WilliamsonResult out;
  out.nu = std::move(nu);
  out.r = make_symplectic(std::move(r));
  return out;
}

EulerResult euler(const SymplecticMatrix& s) {
  if (!is_symplectic(s.entries)) throw NotSymplectic();
  const int n = s.n;
  const Mat om = omega(n);
  const Mat gram = s.entries * s.entries.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram + gram.transpose()));
  const Vec w = es.eigenvalues();

  // eigenvalues of the symplectic s.p.d. Gram matrix pair as (l, 1/l);
  // cluster tolerance decides which sit on the unit shell
  const double unit_tol = 1e-7 * (1.0 + w(2 * n - 1));

  if (w(0) >= 1.0 - unit_tol && w(2 * n - 1) <= 1.0 + unit_tol) {
    // already orthogonal: the factorization is S * I * I
    EulerResult out;
    out.o = s;
    out.squeezings = Vec::Zero(n);
    out.v = make_symplectic(Mat::Identity(2 * n, 2 * n));
    return out;
  }

  std::vector<std::pair<double, Vec>> picked;  // (lambda >= 1, q)
  std::vector<Vec> unit_basis;
  for (int i = 2 * n - 1; i >= 0; --i) {
    if (w(i) > 1.0 + unit_tol) {
      picked.emplace_back(w(i), es.eigenvectors().col(i));
    } else if (std::abs(w(i) - 1.0) <= unit_tol) {
      unit_basis.push_back(es.eigenvectors().col(i));
    }
  }

  // the unit eigenspace is Omega-invariant: peel (q, Omega q) planes
  while (static_cast<int>(picked.size()) < n && !unit_basis.empty()) {
    Vec q = unit_basis.front();
    q.normalize();
    picked.emplace_back(1.0, q);
    const Vec oq = om * q;
    std::vector<Vec> rest;
    for (std::size_t i = 1; i < unit_basis.size(); ++i) {
      Vec b = unit_basis[i];
      b -= q.dot(b) * q;
      b -= oq.dot(b) * oq;
      if (b.norm() > 1e-8) rest.push_back(b.normalized());
    }
    unit_basis = std::move(rest);
  }
  if (static_cast<int>(picked.size()) != n) throw NotSymplectic();

  Mat q(2 * n, n);
  Vec squeezings(n);
  for (int j = 0; j < n; ++j) {
    squeezings(j) = 0.5 * std::log(picked[j].first);
    q.col(j) = picked[j].second;
  }

  Mat o_entries(2 * n, 2 * n);
  o_entries.leftCols(n) = q;
  o_entries.rightCols(n) = -om * q;

  Vec mid(2 * n);
  for (int j = 0; j < n; ++j) {
    mid(j) = std::exp(squeezings(j));
    mid(n + j) = std::exp(-squeezings(j));
  }
  const Mat v_entries =
      mid.cwiseInverse().asDiagonal() * o_entries.transpose() * s.entries;

  EulerResult out;
  out.o = make_symplectic(std::move(o_entries));
  out.squeezings = std::move(squeezings);
  out.v = make_symplectic(v_entries);
  return out;
}

SymplecticMatrix nearest_orthogonal_symplectic(const SymplecticMatrix& s) {
  const EulerResult e = euler(s);
  return make_symplectic(Mat(e.o.entries * e.v.entries));
}

}  // namespace bml::symplectic
