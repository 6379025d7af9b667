#include "bml/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace bml::measurement {

namespace {

constexpr unsigned __int128 kU128Max = ~static_cast<unsigned __int128>(0);

struct ExactCount {
  unsigned __int128 value = 1;
  bool overflowed = false;

  void mul(unsigned __int128 factor) {
    if (factor != 0 && value > kU128Max / factor) {
      overflowed = true;
      value = kU128Max;
    } else {
      value *= factor;
    }
  }

  void pow(unsigned __int128 base, int exp) {
    for (int k = 0; k < exp; ++k) mul(base);
  }
};

bool is_integral(double v) { return v >= 0.0 && v == std::floor(v); }

SampleBudget make_budget(double c1, double c2, int n, bool exact_ok,
                         const std::vector<std::pair<int, int>>& factors1,
                         const std::vector<std::pair<int, int>>& factors2,
                         double approx1, double approx2) {
  SampleBudget out;
  out.n1_approx = std::max(1.0, std::ceil(approx1));
  out.n2_approx = std::max(1.0, std::ceil(approx2));
  out.exact = exact_ok && is_integral(c1) && is_integral(c2);
  if (out.exact) {
    ExactCount a, b;
    a.mul(static_cast<unsigned __int128>(c1));
    for (auto [base, exp] : factors1)
      a.pow(static_cast<unsigned __int128>(base), exp);
    b.mul(static_cast<unsigned __int128>(c2));
    for (auto [base, exp] : factors2)
      b.pow(static_cast<unsigned __int128>(base), exp);
    out.n1 = std::max<unsigned __int128>(a.value, 1);
    out.n2 = std::max<unsigned __int128>(b.value, 1);
    out.overflowed = a.overflowed || b.overflowed;
  } else {
    const double cap = 1e38;
    out.n1 = static_cast<unsigned __int128>(std::min(out.n1_approx, cap));
    out.n2 = static_cast<unsigned __int128>(std::min(out.n2_approx, cap));
    out.n1 = std::max<unsigned __int128>(out.n1, 1);
    out.n2 = std::max<unsigned __int128>(out.n2, 1);
    out.overflowed = approx1 > cap || approx2 > cap;
  }
  (void)n;
  return out;
}

double pow_d(double base, double exp) { return std::pow(base, exp); }

}  // namespace

std::string to_decimal_string(unsigned __int128 value) {
  if (value == 0) return "0";
  std::string out;
  while (value > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<PassiveUnitary> default_probes(int n, std::uint64_t seed) {
  std::vector<PassiveUnitary> probes;
  const int count = 3 * n * n;
  probes.reserve(count);
  for (int k = 0; k < count; ++k)
    probes.push_back(symplectic::random_passive(n, mix_seed(seed, k)));
  return probes;
}

SigmaMoment exact_sigma(const GaussianFockState& state, int t,
                        const PassiveUnitary* probe) {
  if (!state.active()) {
    PassiveUnitary total = *state.w;
    if (probe) {
      total.entries = probe->entries * total.entries;
    }
    return moments::transform_sigma(total, moments::sigma_fock(state.f, t));
  }
  SymplecticMatrix total = *state.s;
  if (probe) {
    total = symplectic::make_symplectic(
        Mat(symplectic::passive_embed(*probe).entries * total.entries));
  }
  const auto l1 =
      moments::transform_lambda(total, moments::lambda_fock(state.f, 1));
  const auto l2 =
      moments::transform_lambda(total, moments::lambda_fock(state.f, 2));
  auto [s1, s2] = moments::lambda_to_sigma(l1, l2);
  return t == 1 ? s1 : s2;
}

namespace {

double variance_bound(const GaussianFockState& state, int t) {
  if (!state.active()) {
    return std::pow(1.0 + state.f.total(), t);
  }
  const double s = state.s->s_max;
  return std::exp(2.0 * t * s) * std::pow(1.0 + state.f.f_max(), t);
}

}  // namespace

std::vector<CorrelatorSample> simulate_correlators(
    const GaussianFockState& state, const std::vector<PassiveUnitary>& probes,
    double shots, std::uint64_t seed) {
  if (shots < 1.0) throw PreconditionViolated("shots must be >= 1");
  const int n = state.modes();
  const double sigma_noise =
      std::isinf(shots) ? 0.0 : variance_bound(state, 2) / std::sqrt(shots);
  std::vector<CorrelatorSample> out;
  out.reserve(probes.size() * n * n);
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const SigmaMoment sig2 = exact_sigma(state, 2, &probes[k]);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::uint64_t cell =
            (static_cast<std::uint64_t>(k) * n + i) * n + j;
        CorrelatorSample sample;
        sample.unitary_index = static_cast<int>(k);
        sample.i = i;
        sample.j = j;
        sample.shots = shots;
        double value = sig2.entries(i * n + j, i * n + j).real();
        if (sigma_noise > 0.0) {
          Rng rng(mix_seed(seed, cell));
          value += sigma_noise * rng.gauss();
        }
        sample.value = value;
        out.push_back(sample);
      }
    }
  }
  return out;
}

std::vector<NumberSample> simulate_number_moments(
    const GaussianFockState& state, const std::vector<PassiveUnitary>& probes,
    double shots, std::uint64_t seed) {
  if (shots < 1.0) throw PreconditionViolated("shots must be >= 1");
  const int n = state.modes();
  const double sigma_noise =
      std::isinf(shots) ? 0.0 : variance_bound(state, 1) / std::sqrt(shots);
  std::vector<NumberSample> out;
  out.reserve(probes.size() * n);
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const SigmaMoment sig1 = exact_sigma(state, 1, &probes[k]);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t cell = static_cast<std::uint64_t>(k) * n + i;
      NumberSample sample;
      sample.unitary_index = static_cast<int>(k);
      sample.i = i;
      sample.shots = shots;
      double value = sig1.entries(i, i).real();
      if (sigma_noise > 0.0) {
        Rng rng(mix_seed(seed, (cell << 1) | 1));
        value += sigma_noise * rng.gauss();
      }
      sample.value = value;
      out.push_back(sample);
    }
  }
  return out;
}

namespace {

// Least squares over Hermitian m x m unknowns X from real equations
// value = u X u^dag. Parameters: m diagonal entries, then (re, im)
// pairs for r < s. Columns are norm-equilibrated before the QR solve.
CMat solve_hermitian_ls(const std::vector<CVec>& us,
                        const std::vector<double>& values, int m) {
  const int params = m * m;
  const int rows = static_cast<int>(us.size());
  if (rows < params) throw RankDeficient("too few equations");
  Mat a(rows, params);
  Vec b(rows);
  for (int r = 0; r < rows; ++r) {
    const CVec& u = us[r];
    b(r) = values[r];
    int col = 0;
    for (int k = 0; k < m; ++k) a(r, col++) = std::norm(u(k));
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) {
        const cplx z = u(p) * std::conj(u(q));
        a(r, col++) = 2.0 * z.real();
        a(r, col++) = -2.0 * z.imag();
      }
  }
  Vec scale(params);
  for (int c = 0; c < params; ++c) {
    scale(c) = a.col(c).norm();
    if (scale(c) == 0.0) throw RankDeficient("degenerate probe column");
    a.col(c) /= scale(c);
  }
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  if (qr.rank() < params) throw RankDeficient("probe system rank-deficient");
  Vec x = qr.solve(b);
  x.array() /= scale.array();

  CMat out(m, m);
  int col = 0;
  for (int k = 0; k < m; ++k) out(k, k) = x(col++);
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q) {
      const double re = x(col++);
      const double im = x(col++);
      out(p, q) = cplx(re, im);
      out(q, p) = cplx(re, -im);
    }
  return out;
}

// orthonormal basis of the swap-symmetric subspace of C^n (x) C^n
CMat symmetric_sector_basis(int n) {
  const int m = n * (n + 1) / 2;
  CMat basis = CMat::Zero(n * n, m);
  int col = 0;
  for (int i = 0; i < n; ++i) basis(i * n + i, col++) = 1.0;
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      basis(i * n + j, col) = inv_root2;
      basis(j * n + i, col) = inv_root2;
      ++col;
    }
  return basis;
}

}  // namespace

SigmaMoment recover_sigma2(const std::vector<CorrelatorSample>& samples,
                           const std::vector<PassiveUnitary>& probes) {
  if (probes.empty() || samples.empty())
    throw RankDeficient("no samples or probes");
  const int n = probes[0].n;
  const int m = n * (n + 1) / 2;
  const CMat basis = symmetric_sector_basis(n);

  std::vector<CVec> us;
  std::vector<double> values;
  us.reserve(samples.size());
  values.reserve(samples.size());
  for (const auto& sample : samples) {
    const CMat& u = probes.at(sample.unitary_index).entries;
    CVec t(n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        t(a * n + b) = u(sample.i, a) * u(sample.j, b);
    us.push_back(basis.transpose() * t);  // basis is real
    values.push_back(sample.value);
  }
  const CMat x = solve_hermitian_ls(us, values, m);

  SigmaMoment out;
  out.t = 2;
  out.n = n;
  CMat rec = basis * x * basis.adjoint();
  out.entries = 0.5 * (rec + CMat(rec.adjoint()));
  return out;
}

SigmaMoment recover_sigma1(const std::vector<NumberSample>& samples,
                           const std::vector<PassiveUnitary>& probes) {
  if (probes.empty() || samples.empty())
    throw RankDeficient("no samples or probes");
  const int n = probes[0].n;
  std::vector<CVec> us;
  std::vector<double> values;
  us.reserve(samples.size());
  values.reserve(samples.size());
  for (const auto& sample : samples) {
    const CMat& u = probes.at(sample.unitary_index).entries;
    CVec t(n);
    for (int a = 0; a < n; ++a) t(a) = u(sample.i, a);
    us.push_back(std::move(t));
    values.push_back(sample.value);
  }
  const CMat x = solve_hermitian_ls(us, values, n);
  SigmaMoment out;
  out.t = 1;
  out.n = n;
  out.entries = 0.5 * (x + CMat(x.adjoint()));
  return out;
}

SampleBudget sample_budget_passive(int n, int f_max, int l1, double alpha,
                                   double c1, double c2) {
  if (n < 1 || f_max < 0 || l1 < 0) throw PreconditionViolated();
  const bool exact_ok = is_integral(alpha);
  const double ne = 9.0 + 2.0 * alpha;
  const double approx1 = c1 * pow_d(n, ne) * pow_d(f_max, 6) * l1;
  const double approx2 = c2 * pow_d(n, ne) * pow_d(f_max, 2) * l1 * l1;
  const int ne_i = exact_ok ? static_cast<int>(9 + 2 * alpha) : 0;
  return make_budget(c1, c2, n, exact_ok,
                     {{n, ne_i}, {f_max, 6}, {l1, 1}},
                     {{n, ne_i}, {f_max, 2}, {l1, 2}}, approx1, approx2);
}

SampleBudget sample_budget_active(int n, int f_max, double s, double alpha,
                                  double beta, double c1, double c2) {
  if (n < 1 || f_max < 0 || s < 0.0) throw PreconditionViolated();
  const bool exact_ok = is_integral(alpha) && is_integral(beta) && s == 0.0;
  const double ne1 = 76.0 + 16.0 * alpha + beta;
  const double ne2 = 12.0 + 2.0 * alpha + beta;
  const double approx1 =
      c1 * pow_d(n, ne1) * pow_d(f_max, 98) * std::exp(120.0 * s);
  const double approx2 =
      c2 * pow_d(n, ne2) * pow_d(f_max, 11) * std::exp(24.0 * s);
  const int ne1_i = exact_ok ? static_cast<int>(76 + 16 * alpha + beta) : 0;
  const int ne2_i = exact_ok ? static_cast<int>(12 + 2 * alpha + beta) : 0;
  return make_budget(c1, c2, n, exact_ok, {{n, ne1_i}, {f_max, 98}},
                     {{n, ne2_i}, {f_max, 11}}, approx1, approx2);
}

}  // namespace bml::measurement
