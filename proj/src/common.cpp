#include "bml/common.hpp"

#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bml {

namespace {

template <typename M>
double power_iteration_norm(const M& m) {
  // largest singular value of m = sqrt of largest eigenvalue of m^dag m
  CMat g = CMat(m).adjoint() * CMat(m);
  const Eigen::Index d = g.rows();
  CVec v = CVec::Ones(d) / std::sqrt(static_cast<double>(d));
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    CVec w = g * v;
    double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - lambda) <= 1e-12 * next && it > 2) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

}  // namespace

namespace {

// dense top singular value via the smaller Gram matrix; only the
// largest eigenvalue is wanted, where this is as accurate as a full SVD
template <typename M>
double gram_norm(const M& m) {
  if (m.rows() <= m.cols()) {
    M g = m * m.adjoint();
    return std::sqrt(std::max(
        0.0, Eigen::SelfAdjointEigenSolver<M>(g).eigenvalues().maxCoeff()));
  }
  M g = m.adjoint() * m;
  return std::sqrt(std::max(
      0.0, Eigen::SelfAdjointEigenSolver<M>(g).eigenvalues().maxCoeff()));
}

}  // namespace

double operator_norm(const CMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const Eigen::Index dim = std::max(m.rows(), m.cols());
  if (dim <= 8) return Eigen::JacobiSVD<CMat>(m).singularValues()(0);
  if (dim < 256) return gram_norm(m);
  return power_iteration_norm(m);
}

double operator_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const Eigen::Index dim = std::max(m.rows(), m.cols());
  if (dim <= 8) return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
  if (dim < 256) return gram_norm(m);
  return power_iteration_norm(m);
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// e-maxx potentials variant of the Hungarian algorithm
std::vector<int> min_cost_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

}  // namespace bml
