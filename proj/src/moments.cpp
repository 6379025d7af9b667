#include "bml/moments.hpp"

#include <Eigen/Eigenvalues>

namespace bml::moments {

namespace {

int pow_int(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void decode_index(int flat, int base, int digits, int* out) {
  for (int k = digits - 1; k >= 0; --k) {
    out[k] = flat % base;
    flat /= base;
  }
}

}  // namespace

cplx fock_expectation(const FockVector& f, std::span<const LadderOp> word) {
  if (word.size() > 8) throw WordTooLong();
  // apply right-to-left to the ket; accumulate the squared coefficient,
  // which stays a perfect-square integer whenever the walk closes
  std::vector<int> occ = f.occ;
  double radicand = 1.0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const int m = it->mode;
    if (m < 0 || m >= f.modes()) throw DimensionMismatch();
    if (it->dag) {
      radicand *= occ[m] + 1;
      occ[m] += 1;
    } else {
      if (occ[m] == 0) return 0.0;
      radicand *= occ[m];
      occ[m] -= 1;
    }
  }
  if (occ != f.occ) return 0.0;
  return std::sqrt(radicand);
}

cplx fock_quadrature_expectation(const FockVector& f,
                                 std::span<const int> quad_word) {
  if (quad_word.size() > 8) throw WordTooLong();
  const int n = f.modes();
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  const std::size_t len = quad_word.size();
  std::vector<LadderOp> ladder(len);
  cplx total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << len); ++mask) {
    cplx coeff = 1.0;
    for (std::size_t k = 0; k < len; ++k) {
      const int idx = quad_word[k];
      if (idx < 0 || idx >= 2 * n) throw DimensionMismatch();
      const bool dag = (mask >> k) & 1;
      ladder[k] = {idx % n, dag};
      if (idx < n) {
        coeff *= inv_root2;  // x = (a + a^dag)/sqrt2
      } else {
        coeff *= dag ? I_UNIT * inv_root2 : -I_UNIT * inv_root2;
      }
    }
    if (coeff != cplx(0.0)) total += coeff * fock_expectation(f, ladder);
  }
  return total;
}

SigmaMoment sigma_fock(const FockVector& f, int t) {
  if (t != 1 && t != 2) throw DegreeMismatch("sigma degree must be 1 or 2");
  const int n = f.modes();
  const int dim = pow_int(n, t);
  SigmaMoment out;
  out.t = t;
  out.n = n;
  out.entries = CMat(dim, dim);
  std::vector<LadderOp> word(2 * t);
  int ridx[2], cidx[2];
  for (int r = 0; r < dim; ++r) {
    decode_index(r, n, t, ridx);
    for (int c = 0; c < dim; ++c) {
      decode_index(c, n, t, cidx);
      for (int k = 0; k < t; ++k) {
        word[k] = {ridx[k], false};
        word[t + k] = {cidx[k], true};
      }
      out.entries(r, c) = fock_expectation(f, word);
    }
  }
  return out;
}

LambdaMoment lambda_fock(const FockVector& f, int t) {
  if (t != 1 && t != 2) throw DegreeMismatch("lambda degree must be 1 or 2");
  const int n = f.modes();
  const int dim = pow_int(2 * n, t);
  LambdaMoment out;
  out.t = t;
  out.n = n;
  out.entries = CMat(dim, dim);
  std::vector<int> word(2 * t);
  int ridx[2], cidx[2];
  for (int r = 0; r < dim; ++r) {
    decode_index(r, 2 * n, t, ridx);
    for (int c = 0; c < dim; ++c) {
      decode_index(c, 2 * n, t, cidx);
      for (int k = 0; k < t; ++k) {
        word[k] = ridx[k];
        word[t + k] = cidx[k];
      }
      out.entries(r, c) = fock_quadrature_expectation(f, word);
    }
  }
  return out;
}

SigmaMoment transform_sigma(const PassiveUnitary& w, const SigmaMoment& sigma) {
  if (sigma.n != w.n) throw DimensionMismatch();
  SigmaMoment out = sigma;
  if (sigma.t == 1) {
    out.entries = w.entries * sigma.entries * w.entries.adjoint();
  } else {
    const CMat k = kron(w.entries, w.entries);
    out.entries = k * sigma.entries * k.adjoint();
  }
  return out;
}

LambdaMoment transform_lambda(const SymplecticMatrix& s,
                              const LambdaMoment& lam) {
  if (lam.n != s.n) throw DimensionMismatch();
  LambdaMoment out = lam;
  if (lam.t == 1) {
    const CMat sc = s.entries.cast<cplx>();
    out.entries = sc * lam.entries * sc.transpose();
  } else {
    const CMat k = kron(s.entries, s.entries).cast<cplx>();
    out.entries = k * lam.entries * k.transpose();
  }
  return out;
}

std::pair<SigmaMoment, SigmaMoment> lambda_to_sigma(const LambdaMoment& lam1,
                                                    const LambdaMoment& lam2) {
  if (lam1.t != 1 || lam2.t != 2 || lam1.n != lam2.n)
    throw DimensionMismatch();
  const int n = lam1.n;
  const CMat& l1 = lam1.entries;
  const CMat& l2 = lam2.entries;

  SigmaMoment s1;
  s1.t = 1;
  s1.n = n;
  s1.entries = CMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s1.entries(i, j) = 0.5 * (l1(i, j) + l1(n + i, n + j) +
                                I_UNIT * l1(n + i, j) - I_UNIT * l1(i, n + j));

  const cplx ipow[3] = {1.0, I_UNIT, -1.0};
  SigmaMoment s2;
  s2.t = 2;
  s2.n = n;
  s2.entries = CMat(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cplx acc = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                  const int row = (i + n * a) * 2 * n + (j + n * b);
                  const int col = (k + n * c) * 2 * n + (l + n * d);
                  acc += ipow[a + b] * std::conj(ipow[c + d]) * l2(row, col);
                }
          s2.entries(i * n + j, k * n + l) = 0.25 * acc;
        }
  return {std::move(s1), std::move(s2)};
}

CMat add_noise(const CMat& m, const NoiseSpec& spec) {
  if (spec.epsilon < 0.0) throw PreconditionViolated("epsilon must be >= 0");
  if (spec.epsilon == 0.0) return m;
  const Eigen::Index dim = m.rows();
  CMat e(dim, m.cols());
  Rng rng(spec.seed);
  switch (spec.model) {
    case NoiseModel::GaussianEntry:
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) e(i, j) = rng.cgauss();
      break;
    case NoiseModel::UniformEntry:
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          e(i, j) = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      break;
    case NoiseModel::AdversarialEigvec: {
      const CMat h = 0.5 * (m + CMat(m.adjoint()));
      Eigen::SelfAdjointEigenSolver<CMat> es(h);
      Eigen::Index top = 0;
      es.eigenvalues().cwiseAbs().maxCoeff(&top);
      const CVec v = es.eigenvectors().col(top);
      e = v * v.adjoint();
      break;
    }
  }
  e = 0.5 * (e + CMat(e.adjoint()));
  const double nrm = operator_norm(e);
  if (nrm == 0.0) return m;
  return m + (spec.epsilon / nrm) * e;
}

SigmaMoment add_noise(const SigmaMoment& m, const NoiseSpec& spec) {
  SigmaMoment out = m;
  out.entries = add_noise(m.entries, spec);
  return out;
}

LambdaMoment add_noise(const LambdaMoment& m, const NoiseSpec& spec) {
  LambdaMoment out = m;
  out.entries = add_noise(m.entries, spec);
  return out;
}

}  // namespace bml::moments
