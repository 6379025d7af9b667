#include <doctest.h>

#include <cmath>
#include <limits>

#include "bml/measurement.hpp"

using namespace bml;
using namespace bml::measurement;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GaussianFockState passive_state(int n, const std::vector<int>& f,
                                std::uint64_t seed) {
  GaussianFockState st;
  st.f = FockVector(f);
  st.w = symplectic::random_passive(n, seed);
  return st;
}

}  // namespace

TEST_CASE("simulate_correlators at infinite shots returns exact values") {
  const auto st = passive_state(2, {1, 0}, 31);
  const auto probes = default_probes(2, 99);
  const auto samples = simulate_correlators(st, probes, kInf, 5);
  REQUIRE(samples.size() == probes.size() * 4);
  for (const auto& s : samples) {
    const auto exact = exact_sigma(st, 2, &probes[s.unitary_index]);
    const cplx expect = exact.entries(s.i * 2 + s.j, s.i * 2 + s.j);
    CHECK(std::abs(expect.imag()) <= 1e-10);
    CHECK(std::abs(s.value - expect.real()) <= 1e-12);
  }
}

TEST_CASE("single-mode correlator anchor value") {
  GaussianFockState st;
  st.f = FockVector({1});
  st.w = symplectic::make_passive(CMat::Identity(1, 1));
  std::vector<symplectic::PassiveUnitary> probes = {*st.w};
  const auto samples = simulate_correlators(st, probes, kInf, 0);
  REQUIRE(samples.size() == 1);
  CHECK(std::abs(samples[0].value - 6.0) <= 1e-12);  // <a a adag adag> on |1>
}

TEST_CASE("noise standard deviation tracks the calibrated bound") {
  const auto st = passive_state(1, {2}, 77);
  std::vector<symplectic::PassiveUnitary> probes = {
      symplectic::random_passive(1, 3)};
  const double shots = 1e4;
  const double vb = std::pow(1.0 + st.f.total(), 2);  // degree-2 bound
  const double target = vb / std::sqrt(shots);

  const auto exact = simulate_correlators(st, probes, kInf, 0);
  double sq_sum = 0.0;
  const int redraws = 1000;
  for (int k = 0; k < redraws; ++k) {
    const auto noisy = simulate_correlators(st, probes, shots, 1000 + k);
    const double dev = noisy[0].value - exact[0].value;
    sq_sum += dev * dev;
  }
  const double emp = std::sqrt(sq_sum / redraws);
  CHECK(std::abs(emp - target) <= 0.10 * target);
}

TEST_CASE("recover_sigma2 inverts the forward expansion at zero noise") {
  const auto st = passive_state(2, {1, 0}, 11);
  const auto probes = default_probes(2, 12);
  const auto samples = simulate_correlators(st, probes, kInf, 0);
  const auto rec = recover_sigma2(samples, probes);
  const auto exact = exact_sigma(st, 2);
  CHECK(operator_norm(CMat(rec.entries - exact.entries)) <=
        1e-10 * (1.0 + operator_norm(exact.entries)));
}

TEST_CASE("recover_sigma1 inverts the forward expansion at zero noise") {
  const auto st = passive_state(3, {2, 1, 0}, 13);
  const auto probes = default_probes(3, 14);
  const auto samples = simulate_number_moments(st, probes, kInf, 0);
  const auto rec = recover_sigma1(samples, probes);
  const auto exact = exact_sigma(st, 1);
  CHECK(operator_norm(CMat(rec.entries - exact.entries)) <=
        1e-10 * (1.0 + operator_norm(exact.entries)));
}

TEST_CASE("recover_sigma2 on one mode returns the single correlator") {
  GaussianFockState st;
  st.f = FockVector({1});
  st.w = symplectic::make_passive(CMat::Identity(1, 1));
  const auto probes = default_probes(1, 16);
  const double shots = 1e8;
  const auto samples = simulate_correlators(st, probes, shots, 2);
  const auto rec = recover_sigma2(samples, probes);
  CHECK(std::abs(rec.entries(0, 0).real() - 6.0) <= 1e-2);
}

TEST_CASE("recovery error scales linearly with per-equation noise") {
  const auto st = passive_state(2, {1, 1}, 21);
  const auto probes = default_probes(2, 22);
  const auto exact = exact_sigma(st, 2);

  std::vector<double> sig, err;
  for (double shots : {1e6, 1e7, 1e8, 1e9, 1e10}) {
    double total = 0.0;
    const int reps = 8;
    for (int k = 0; k < reps; ++k) {
      const auto samples =
          simulate_correlators(st, probes, shots, 100 * k + 7);
      const auto rec = recover_sigma2(samples, probes);
      total += operator_norm(CMat(rec.entries - exact.entries));
    }
    sig.push_back(std::pow(1.0 + st.f.total(), 2) / std::sqrt(shots));
    err.push_back(total / reps);
  }
  // linear fit of err against sig: R^2 above 0.99
  const int m = static_cast<int>(sig.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    sx += sig[i];
    sy += err[i];
    sxx += sig[i] * sig[i];
    sxy += sig[i] * err[i];
    syy += err[i] * err[i];
  }
  const double r_num = m * sxy - sx * sy;
  const double r_den =
      std::sqrt((m * sxx - sx * sx) * (m * syy - sy * sy));
  const double r2 = (r_num / r_den) * (r_num / r_den);
  CHECK(r2 > 0.99);
}

TEST_CASE("rank deficiency is reported for degenerate probes") {
  GaussianFockState st = passive_state(2, {1, 0}, 41);
  // a single repeated probe cannot span the unknowns
  std::vector<symplectic::PassiveUnitary> probes = {
      symplectic::random_passive(2, 1), symplectic::random_passive(2, 1)};
  const auto samples = simulate_correlators(st, probes, kInf, 0);
  CHECK_THROWS_AS(recover_sigma2(samples, probes), RankDeficient);
}

TEST_CASE("passive sample budget formulas") {
  const auto b = sample_budget_passive(2, 1, 2, 1.0, 1.0, 1.0);
  CHECK(b.exact);
  CHECK(to_decimal_string(b.n1) == "4096");
  CHECK(to_decimal_string(b.n2) == "8192");

  // alpha = 0 vs alpha = 1 differ by n^2
  const auto b0 = sample_budget_passive(2, 1, 2, 0.0, 1.0, 1.0);
  CHECK(b.n1 == b0.n1 * 4);
  CHECK(b.n2 == b0.n2 * 4);

  // doubling f_max multiplies N1 by 64
  const auto bf = sample_budget_passive(2, 2, 2, 1.0, 1.0, 1.0);
  CHECK(bf.n1 == b.n1 * 64);

  // vacuum clamps to one sample
  const auto bv = sample_budget_passive(2, 0, 0, 1.0, 1.0, 1.0);
  CHECK(to_decimal_string(bv.n1) == "1");
}

TEST_CASE("active sample budget formulas") {
  const auto unit = sample_budget_active(1, 1, 0.0, 0.0, 0.0, 1.0, 1.0);
  CHECK(unit.exact);
  CHECK(to_decimal_string(unit.n1) == "1");
  CHECK(to_decimal_string(unit.n2) == "1");

  const auto two = sample_budget_active(2, 1, 0.0, 0.0, 0.0, 1.0, 1.0);
  CHECK(to_decimal_string(two.n1) == "75557863725914323419136");  // 2^76
  CHECK(to_decimal_string(two.n2) == "4096");                     // 2^12

  // monotone in each argument
  const auto more_f = sample_budget_active(2, 2, 0.0, 0.0, 0.0, 1.0, 1.0);
  CHECK(more_f.n1 > two.n1);
  const auto more_s = sample_budget_active(2, 1, 0.1, 0.0, 0.0, 1.0, 1.0);
  CHECK_FALSE(more_s.exact);
  CHECK(more_s.n1_approx > two.n1_approx);
}
