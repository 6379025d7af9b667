#include <doctest.h>

#include <array>
#include <numeric>

#include "bml/invariants.hpp"
#include "bml/learner.hpp"

using namespace bml;
using namespace bml::invariants;

namespace {

MomentSet fock_moment_set(const symplectic::SymplecticMatrix& s,
                          const FockVector& f) {
  const auto l1 = moments::transform_lambda(s, moments::lambda_fock(f, 1));
  const auto l2 = moments::transform_lambda(s, moments::lambda_fock(f, 2));
  return moment_set_from_lambda(l1, l2);
}

MomentSet vacuum_set(int n) {
  const auto id = symplectic::make_symplectic(Mat::Identity(2 * n, 2 * n));
  return fock_moment_set(id, FockVector(std::vector<int>(n, 0)));
}

// composition of position maps: (a o b)(k) = a[b[k]]
std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[b[k]];
  return out;
}

}  // namespace

TEST_CASE("gamma_tensor basics") {
  const auto set = vacuum_set(1);
  const std::array<int, 1> two = {2};
  const auto g2 = gamma_tensor(set, two);
  CHECK(g2.degree == 2);
  CHECK(g2.entries == set.degree(2).entries);

  const std::array<int, 2> twotwo = {2, 2};
  const auto g22 = gamma_tensor(set, twotwo);
  CHECK(g22.degree == 4);
  // spot entries are products
  const int dim = 2;
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int i = rng.uniform_int(dim), j = rng.uniform_int(dim);
    const int k = rng.uniform_int(dim), l = rng.uniform_int(dim);
    const cplx lhs = g22.entries(((i * dim + j) * dim + k) * dim + l);
    const cplx rhs = set.degree(2).entries(i * dim + j) *
                     set.degree(2).entries(k * dim + l);
    CHECK(std::abs(lhs - rhs) <= 1e-14);
  }

  // odd-degree factors are fine as long as the total is even; for Fock
  // states odd moments vanish so the product is the zero tensor
  const std::array<int, 2> onethree = {3, 1};
  CHECK(gamma_tensor(set, onethree).entries.norm() == 0.0);

  const std::array<int, 1> odd = {3};
  CHECK_THROWS_AS(gamma_tensor(set, odd), OddTotalDegree);
}

TEST_CASE("theta_contraction anchor values") {
  const auto set = vacuum_set(1);
  const std::array<int, 1> two = {2};
  const auto g2 = gamma_tensor(set, two);
  const std::vector<int> id2 = {0, 1};
  const cplx value = theta_contraction(g2, id2);
  CHECK(std::abs(value - cplx(0.0, 1.0)) <= 1e-14);

  // same value through the reshape identity trace(Omega^T Sigma)
  const Mat om = symplectic::omega(1);
  cplx trace = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      trace += om(i, j) * set.degree(2).entries(i * 2 + j);
  CHECK(std::abs(value - trace) <= 1e-14);

  // multimode vacuum: i * n
  const auto set3 = vacuum_set(3);
  const auto g23 = gamma_tensor(set3, two);
  CHECK(std::abs(theta_contraction(g23, id2) - cplx(0.0, 3.0)) <= 1e-12);

  // odd moments vanish: s = (1,1) contracts to zero
  const std::array<int, 2> oneone = {1, 1};
  const auto g11 = gamma_tensor(set3, oneone);
  CHECK(std::abs(theta_contraction(g11, id2)) == 0.0);
}

TEST_CASE("eigen_invariants anchor values") {
  // vacuum: eigenvalues of i Omega (I/2 + i Omega / 2) are {0, 1}
  const auto set = vacuum_set(1);
  const std::array<int, 1> two = {2};
  const auto g2 = gamma_tensor(set, two);
  const std::vector<int> id1 = {0};
  const auto ev = eigen_invariants(g2, id1);
  REQUIRE(ev.size() == 2);
  CHECK(std::abs(ev[0] - cplx(0.0)) <= 1e-12);
  CHECK(std::abs(ev[1] - cplx(1.0)) <= 1e-12);

  // real covariance tensor of a Fock state: positive eigenvalues 1/2+f
  const FockVector f({2, 0});
  const auto lam = moments::lambda_fock(f, 1);
  MomentTensor cov;
  cov.degree = 2;
  cov.n = 2;
  cov.entries = CVec(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      cov.entries(i * 4 + j) = lam.entries(i, j).real();
  const auto evc = eigen_invariants(cov, id1);
  std::vector<double> positive;
  for (cplx z : evc)
    if (z.real() > 0) positive.push_back(z.real());
  std::sort(positive.begin(), positive.end());
  REQUIRE(positive.size() == 2);
  CHECK(std::abs(positive[0] - 0.5) <= 1e-9);
  CHECK(std::abs(positive[1] - 2.5) <= 1e-9);
}

TEST_CASE("invariants are unchanged by symplectic transformations") {
  const auto base = fock_moment_set(
      symplectic::random_symplectic(2, 0.5, 41), FockVector({1, 0}));
  const auto specs = enumerate_specs(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = symplectic::random_symplectic(2, 0.7, 5000 + seed);
    const auto moved = transform_moment_set(t, base);
    for (const auto& spec : specs) {
      const auto ga = gamma_tensor(base, spec.s);
      const auto gb = gamma_tensor(moved, spec.s);
      if (spec.kind == InvariantKind::Contraction) {
        const cplx va = theta_contraction(ga, spec.pi);
        const cplx vb = theta_contraction(gb, spec.pi);
        CHECK(std::abs(va - vb) <= 1e-7 * (1.0 + std::abs(va)));
      } else {
        const auto sa = eigen_invariants(ga, spec.pi);
        const auto sb = eigen_invariants(gb, spec.pi);
        double mag = 0.0;
        for (cplx z : sa) mag = std::max(mag, std::abs(z));
        CHECK(spectrum_distance(sa, sb) <= 1e-7 * (1.0 + mag));
      }
    }
  }
}

TEST_CASE("contraction symmetry group is sound") {
  const auto set = fock_moment_set(symplectic::random_symplectic(1, 0.6, 99),
                                   FockVector({1}));
  const std::vector<int> s = {2, 2};
  const auto gamma = gamma_tensor(set, s);

  // gamma-block swap for s=(2,2) and theta-pair swap
  const std::vector<int> block_swap = {2, 3, 0, 1};
  const std::vector<int> pair_swap = {2, 3, 0, 1};

  Rng rng(4);
  std::vector<int> pi = {0, 1, 2, 3};
  for (int trial = 0; trial < 20; ++trial) {
    for (int k = 3; k > 0; --k)
      std::swap(pi[k], pi[rng.uniform_int(k + 1)]);
    const cplx base = theta_contraction(gamma, pi);
    const cplx via_block =
        theta_contraction(gamma, compose(block_swap, pi));
    const cplx via_pair = theta_contraction(gamma, compose(pi, pair_swap));
    CHECK(std::abs(base - via_block) <= 1e-12 * (1.0 + std::abs(base)));
    CHECK(std::abs(base - via_pair) <= 1e-12 * (1.0 + std::abs(base)));
  }
}

TEST_CASE("enumerate_specs dedupes and caps the budget") {
  const auto specs = enumerate_specs(4);
  CHECK(!specs.empty());
  // every listed contraction spec is its own canonical representative:
  // no two specs with the same s may be related by the symmetry group
  int contractions = 0;
  for (const auto& spec : specs)
    if (spec.kind == InvariantKind::Contraction) ++contractions;
  CHECK(contractions < 2 + 24 * 4);  // strictly fewer than raw |s|! counts
  CHECK_THROWS_AS(enumerate_specs(10), TooLarge);
}

TEST_CASE("witness search: identical and transformed states agree") {
  const auto a = fock_moment_set(symplectic::random_symplectic(2, 0.5, 7),
                                 FockVector({1, 0}));
  CHECK_FALSE(convertibility_witness(a, a, 4).has_value());

  // a symplectically transformed copy of the same state
  const auto t = symplectic::random_symplectic(2, 0.5, 8);
  const auto b = transform_moment_set(t, a);
  CHECK_FALSE(convertibility_witness(a, b, 4).has_value());
}

TEST_CASE("witness search separates the two-mode superposition pair") {
  const int cutoff = 10;
  std::vector<oracle::SuperpositionTerm> ta = {
      {FockVector({2, 2}), 1.0},
      {FockVector({1, 0}), std::sqrt(3.0)},
      {FockVector({0, 1}), std::sqrt(2.0)}};
  std::vector<oracle::SuperpositionTerm> tb = {
      {FockVector({2, 2}), 1.0},
      {FockVector({1, 0}), 1.0},
      {FockVector({0, 1}), 2.0}};
  const auto psi_a = oracle::truncated_superposition(ta, 2, cutoff);
  const auto psi_b = oracle::truncated_superposition(tb, 2, cutoff);
  const auto ma = moment_set_from_truncated(psi_a);
  const auto mb = moment_set_from_truncated(psi_b);

  // covariance symplectic eigenvalues coincide...
  CMat cov_a(4, 4), cov_b(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cov_a(i, j) = ma.degree(2).entries(i * 4 + j).real();
      cov_b(i, j) = mb.degree(2).entries(i * 4 + j).real();
    }
  const auto wa = symplectic::williamson(Mat(cov_a.real()));
  const auto wb = symplectic::williamson(Mat(cov_b.real()));
  CHECK(std::abs(wa.nu(0) - wb.nu(0)) <= 1e-9);
  CHECK(std::abs(wa.nu(1) - wb.nu(1)) <= 1e-9);
  CHECK(std::abs(wa.nu(0) - 5.0 / 6.0) <= 1e-9);
  CHECK(std::abs(wa.nu(1) - 5.0 / 3.0) <= 1e-9);

  // ...yet a higher invariant separates the states
  const auto witness = convertibility_witness(ma, mb, 4);
  REQUIRE(witness.has_value());
  CHECK(witness->gap > 1e-3);
}

TEST_CASE("photon-subtracted squeezed state is indistinguishable from |1>") {
  const int cutoff = 28;
  const double r = 0.35;
  Mat sq(2, 2);
  sq << std::exp(r), 0.0, 0.0, std::exp(-r);
  const CMat u = oracle::gaussian_unitary_truncated(
      symplectic::make_symplectic(sq), cutoff);
  auto xi = oracle::evolve(u, oracle::truncated_fock(FockVector({0}), cutoff));
  // subtract one photon: amp'[l] = sqrt(l+1) amp[l+1], then normalize
  CVec sub = CVec::Zero(cutoff);
  for (int l = 0; l + 1 < cutoff; ++l)
    sub(l) = std::sqrt(l + 1.0) * xi.amplitudes(l + 1);
  oracle::TruncatedState psi;
  psi.n = 1;
  psi.cutoff = cutoff;
  psi.amplitudes = sub / sub.norm();

  const auto ma = moment_set_from_truncated(
      oracle::truncated_fock(FockVector({1}), cutoff));
  const auto mb = moment_set_from_truncated(psi);
  CHECK_FALSE(convertibility_witness(ma, mb, 4).has_value());
}

TEST_CASE("moment sets with nonzero first moments are rejected") {
  // a coherent-like superposition of |0> and |1> has <x> != 0
  std::vector<oracle::SuperpositionTerm> terms = {{FockVector({0}), 1.0},
                                                  {FockVector({1}), 1.0}};
  const auto psi = oracle::truncated_superposition(terms, 1, 12);
  CHECK_THROWS_AS(moment_set_from_truncated(psi), PreconditionViolated);
}
