#include <doctest.h>

#include <array>

#include "bml/moments.hpp"
#include "bml/oracle.hpp"

using namespace bml;
using namespace bml::moments;

namespace {

SigmaMoment sigma_of_state(const symplectic::PassiveUnitary& w,
                           const FockVector& f, int t) {
  return transform_sigma(w, sigma_fock(f, t));
}

}  // namespace

TEST_CASE("fock_expectation matches the correlator table") {
  // <b| a a adag adag |b> = (b+1)(b+2)
  const FockVector f1({1});
  const std::array<LadderOp, 4> w1 = {
      LadderOp{0, false}, {0, false}, {0, true}, {0, true}};
  CHECK(fock_expectation(f1, w1) == cplx(6.0));

  // <bb| a1 a2 a1dag a2dag |bb> = (b+1)^2
  const FockVector f2({1, 1});
  const std::array<LadderOp, 4> w2 = {
      LadderOp{0, false}, {1, false}, {0, true}, {1, true}};
  CHECK(fock_expectation(f2, w2) == cplx(4.0));

  // mixed occupations: (f1+1)(f2+1)
  const FockVector f3({0, 2});
  CHECK(fock_expectation(f3, w2) == cplx(3.0));

  // unmatched ladder counts vanish
  const std::array<LadderOp, 2> w3 = {LadderOp{0, false}, {0, false}};
  CHECK(fock_expectation(f1, w3) == cplx(0.0));
}

TEST_CASE("fock_expectation rejects long words") {
  const FockVector f({0});
  std::vector<LadderOp> word(9, LadderOp{0, true});
  CHECK_THROWS_AS(fock_expectation(f, word), WordTooLong);
}

TEST_CASE("sigma_fock closed forms") {
  // vacuum degree 2: I + SWAP
  const int n = 3;
  const auto vac = sigma_fock(FockVector(std::vector<int>(n, 0)), 2);
  CMat expected = CMat::Identity(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) expected(i * n + j, j * n + i) += 1.0;
  CHECK(operator_norm(CMat(vac.entries - expected)) <= 1e-14);

  // f = (1,1): diagonal 6 on (ii;ii), 4 on (ij;ij) and (ij;ji)
  const auto s11 = sigma_fock(FockVector({1, 1}), 2);
  CHECK(s11.entries(0, 0) == cplx(6.0));
  CHECK(s11.entries(3, 3) == cplx(6.0));
  CHECK(s11.entries(1, 1) == cplx(4.0));
  CHECK(s11.entries(1, 2) == cplx(4.0));
  CHECK(s11.entries(2, 1) == cplx(4.0));
  CHECK(s11.entries(0, 1) == cplx(0.0));

  // degree 1: I + diag(f)
  const auto s1 = sigma_fock(FockVector({2, 0}), 1);
  CHECK(s1.entries(0, 0) == cplx(3.0));
  CHECK(s1.entries(1, 1) == cplx(1.0));
  CHECK(s1.entries(0, 1) == cplx(0.0));
}

TEST_CASE("general sigma_fock equals (sigma1)^ox2 (I + SWAP) - T") {
  const FockVector f({2, 0, 1});
  const int n = f.modes();
  const auto s1 = sigma_fock(f, 1);
  const auto s2 = sigma_fock(f, 2);
  CMat swap = CMat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) swap(i * n + j, j * n + i) = 1.0;
  CMat expected = kron(s1.entries, s1.entries) *
                  (CMat::Identity(n * n, n * n) + swap);
  for (int i = 0; i < n; ++i)
    expected(i * n + i, i * n + i) -= f.occ[i] * (f.occ[i] + 1.0);
  CHECK(operator_norm(CMat(s2.entries - expected)) <= 1e-12);
}

TEST_CASE("lambda_fock vacuum and single-photon values") {
  const auto vac = lambda_fock(FockVector({0}), 1);
  CHECK(std::abs(vac.entries(0, 0) - cplx(0.5)) <= 1e-14);
  CHECK(std::abs(vac.entries(0, 1) - cplx(0.0, 0.5)) <= 1e-14);
  CHECK(std::abs(vac.entries(1, 0) - cplx(0.0, -0.5)) <= 1e-14);
  CHECK(std::abs(vac.entries(1, 1) - cplx(0.5)) <= 1e-14);

  const auto one = lambda_fock(FockVector({1}), 1);
  CHECK(std::abs(one.entries(0, 0).real() - 1.5) <= 1e-14);
  CHECK(std::abs(one.entries(1, 1).real() - 1.5) <= 1e-14);

  // <x^4> for |1> is 15/4
  const auto one2 = lambda_fock(FockVector({1}), 2);
  CHECK(std::abs(one2.entries(0, 0) - cplx(3.75)) <= 1e-12);
}

TEST_CASE("transform_sigma preserves structure") {
  const FockVector f({1, 0});
  const auto s2 = sigma_fock(f, 2);
  const auto id = symplectic::make_passive(CMat::Identity(2, 2));
  CHECK(operator_norm(CMat(transform_sigma(id, s2).entries - s2.entries)) ==
        0.0);

  const auto w = symplectic::random_passive(2, 9);
  const auto moved = transform_sigma(w, s2);
  CHECK(std::abs(moved.entries.trace() - s2.entries.trace()) <= 1e-10);
  // exact trace: n + |f|_1 for degree 1
  const auto s1 = transform_sigma(w, sigma_fock(f, 1));
  CHECK(std::abs(s1.entries.trace() - cplx(3.0)) <= 1e-12);
}

TEST_CASE("transform_lambda preserves the commutator block") {
  const FockVector f({1, 2});
  const auto lam = lambda_fock(f, 1);
  const auto s = symplectic::random_symplectic(2, 1.0, 17);
  const auto moved = transform_lambda(s, lam);
  const CMat comm = moved.entries - moved.entries.transpose();
  const CMat expected =
      I_UNIT * symplectic::omega(2).cast<cplx>();
  CHECK(operator_norm(CMat(comm - expected)) <= 1e-10);

  // symplectic eigenvalues of the real part are invariant
  const auto wil = symplectic::williamson(Mat(moved.entries.real()));
  CHECK(std::abs(wil.nu(0) - 1.5) <= 1e-8);
  CHECK(std::abs(wil.nu(1) - 2.5) <= 1e-8);
}

TEST_CASE("lambda_to_sigma round trip on Fock moments") {
  const FockVector f({0, 1, 2});
  const auto [s1, s2] = lambda_to_sigma(lambda_fock(f, 1), lambda_fock(f, 2));
  CHECK(operator_norm(CMat(s1.entries - sigma_fock(f, 1).entries)) <= 1e-10);
  CHECK(operator_norm(CMat(s2.entries - sigma_fock(f, 2).entries)) <= 1e-10);

  // vacuum n=1: sigma1 = <a adag> = 1
  const FockVector vac({0});
  const auto [v1, v2] = lambda_to_sigma(lambda_fock(vac, 1), lambda_fock(vac, 2));
  CHECK(std::abs(v1.entries(0, 0) - cplx(1.0)) <= 1e-14);
}

TEST_CASE("commuting diagram: quadrature vs ladder transport") {
  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(3));
    std::vector<int> occ(n);
    for (int& v : occ) v = static_cast<int>(rng.uniform_int(4));
    const FockVector f(occ);
    const auto w = symplectic::random_passive(n, 7000 + trial);
    const auto s = symplectic::passive_embed(w);

    const auto lam1 = transform_lambda(s, lambda_fock(f, 1));
    const auto lam2 = transform_lambda(s, lambda_fock(f, 2));
    const auto [c1, c2] = lambda_to_sigma(lam1, lam2);

    const auto d1 = sigma_of_state(w, f, 1);
    const auto d2 = sigma_of_state(w, f, 2);
    CHECK(operator_norm(CMat(c1.entries - d1.entries)) <=
          1e-8 * (1.0 + operator_norm(d1.entries)));
    CHECK(operator_norm(CMat(c2.entries - d2.entries)) <=
          1e-8 * (1.0 + operator_norm(d2.entries)));
  }
}

TEST_CASE("moment entries match the truncated simulator") {
  const FockVector f({1, 0});
  const auto w = symplectic::random_passive(2, 4242);
  const int cutoff = 8;
  const auto u = oracle::passive_unitary_truncated(w, cutoff);
  const auto psi = oracle::evolve(u, oracle::truncated_fock(f, cutoff));

  const auto s2 = sigma_of_state(w, f, 2);
  const int n = 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const std::array<LadderOp, 4> word = {LadderOp{i, false},
                                                {j, false},
                                                {k, true},
                                                {l, true}};
          const cplx brute = oracle::moment_bruteforce(psi, word);
          CHECK(std::abs(brute - s2.entries(i * n + j, k * n + l)) <= 1e-8);
        }
}

TEST_CASE("add_noise contract") {
  const auto base = sigma_fock(FockVector({1, 1}), 2);

  NoiseSpec zero{0.0, NoiseModel::GaussianEntry, 3};
  CHECK(operator_norm(CMat(add_noise(base, zero).entries - base.entries)) ==
        0.0);

  for (auto model : {NoiseModel::GaussianEntry, NoiseModel::UniformEntry,
                     NoiseModel::AdversarialEigvec}) {
    NoiseSpec spec{1e-3, model, 11};
    const auto noisy = add_noise(base, spec);
    const double dist = operator_norm(CMat(noisy.entries - base.entries));
    CHECK(std::abs(dist - 1e-3) <= 1e-12);
    // Hermiticity preserved
    CHECK(operator_norm(CMat(noisy.entries - noisy.entries.adjoint())) <=
          1e-12);
    // determinism
    const auto again = add_noise(base, spec);
    CHECK(again.entries == noisy.entries);
  }
}
