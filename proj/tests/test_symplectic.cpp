#include <doctest.h>

#include "bml/symplectic.hpp"

using namespace bml;
using namespace bml::symplectic;

namespace {

double sympl_defect(const Mat& s) {
  const int n = static_cast<int>(s.rows()) / 2;
  return operator_norm(Mat(s * omega(n) * s.transpose() - omega(n)));
}

}  // namespace

TEST_CASE("omega is antisymmetric with square -I") {
  for (int n : {1, 2, 5}) {
    const Mat om = omega(n);
    CHECK(operator_norm(Mat(om + om.transpose())) == 0.0);
    CHECK(operator_norm(Mat(om * om + Mat::Identity(2 * n, 2 * n))) == 0.0);
  }
}

TEST_CASE("passive_embed identity and diag(i)") {
  const auto id2 = make_passive(CMat::Identity(2, 2));
  CHECK(operator_norm(Mat(passive_embed(id2).entries -
                          Mat::Identity(4, 4))) == 0.0);

  CMat w(1, 1);
  w(0, 0) = cplx(0.0, 1.0);
  const Mat e = passive_embed(make_passive(w)).entries;
  Mat expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(operator_norm(Mat(e - expected)) == 0.0);
}

TEST_CASE("passive_embed of random unitary is orthogonal symplectic") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto w = random_passive(4, seed);
    CHECK(is_orthogonal_symplectic(passive_embed(w).entries));
  }
}

TEST_CASE("passive_embed rejects non-unitary input") {
  CMat bad = 2.0 * CMat::Identity(2, 2);
  CHECK_THROWS_AS(make_passive(bad), NonUnitaryInput);
}

TEST_CASE("passive_embed is a homomorphism") {
  for (int trial = 0; trial < 100; ++trial) {
    const auto u1 = random_passive(3, 100 + trial);
    const auto u2 = random_passive(3, 200 + trial);
    PassiveUnitary prod;
    prod.n = 3;
    prod.entries = u1.entries * u2.entries;
    const Mat lhs = passive_embed(prod).entries;
    const Mat rhs = passive_embed(u1).entries * passive_embed(u2).entries;
    CHECK(operator_norm(Mat(lhs - rhs)) <= 1e-12);
  }
}

TEST_CASE("random_passive determinism and column norms") {
  const auto a = random_passive(3, 7);
  const auto b = random_passive(3, 7);
  CHECK(a.entries == b.entries);  // bitwise

  const auto c = random_passive(1, 42);
  CHECK(std::abs(std::abs(c.entries(0, 0)) - 1.0) <= 1e-12);

  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(a.entries.col(j).norm() - 1.0) <= 1e-12);
}

TEST_CASE("random_symplectic properties") {
  const auto ortho = random_symplectic(3, 0.0, 5);
  CHECK(is_orthogonal_symplectic(ortho.entries));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_symplectic(3, 1.0, seed);
    CHECK(sympl_defect(s.entries) <= 1e-10);
    const double ns = operator_norm(s.entries);
    const double ninv = operator_norm(Mat(s.entries.inverse()));
    CHECK(std::abs(ns / ninv - 1.0) <= 1e-10);
    CHECK(ns <= std::exp(1.0) * (1.0 + 1e-12));
    CHECK(std::abs(std::log(ns) - s.s_max) <= 1e-12);
  }
}

TEST_CASE("williamson of the vacuum covariance") {
  const int n = 3;
  const Mat m = 0.5 * Mat::Identity(2 * n, 2 * n);
  const auto res = williamson(m);
  for (int i = 0; i < n; ++i) CHECK(std::abs(res.nu(i) - 0.5) <= 1e-12);
  CHECK(is_orthogonal_symplectic(res.r.entries));
}

TEST_CASE("williamson recovers nu = 1/2 + f for transformed Fock covariances") {
  const int n = 3;
  const std::vector<int> f = {0, 2, 1};
  Vec diag(2 * n);
  for (int i = 0; i < n; ++i) diag(i) = diag(n + i) = 0.5 + f[i];
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_symplectic(n, 1.0, seed);
    const Mat m = s.entries * diag.asDiagonal() * s.entries.transpose();
    const auto res = williamson(m);
    // sorted occupations: 0, 1, 2
    CHECK(std::abs(res.nu(0) - 0.5) <= 1e-8);
    CHECK(std::abs(res.nu(1) - 1.5) <= 1e-8);
    CHECK(std::abs(res.nu(2) - 2.5) <= 1e-8);
    Vec nu2(2 * n);
    for (int i = 0; i < n; ++i) nu2(i) = nu2(n + i) = res.nu(i);
    const Mat rec = res.r.entries * nu2.asDiagonal() * res.r.entries.transpose();
    CHECK(operator_norm(Mat(rec - m)) <= tol_rec(operator_norm(m)));
  }
}

TEST_CASE("williamson of a pure single-mode squeeze") {
  Mat m(2, 2);
  m << 0.5 * std::exp(1.0), 0.0, 0.0, 0.5 * std::exp(-1.0);
  const auto res = williamson(m);
  CHECK(std::abs(res.nu(0) - 0.5) <= 1e-10);
}

TEST_CASE("williamson eigenvalues invariant under symplectic conjugation") {
  const int n = 2;
  Vec diag(2 * n);
  diag << 1.5, 0.5, 1.5, 0.5;
  const Mat m0 = diag.asDiagonal();
  const auto base = williamson(m0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = random_symplectic(n, 0.8, 1000 + seed);
    const Mat m = t.entries * m0 * t.entries.transpose();
    const auto res = williamson(m);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(res.nu(i) - base.nu(i)) <= 1e-8);
  }
}

TEST_CASE("williamson input validation") {
  Mat notsym(2, 2);
  notsym << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(williamson(notsym), NotSymmetric);

  Mat notpd = -Mat::Identity(2, 2);
  CHECK_THROWS_AS(williamson(notpd), NotPositiveDefinite);
}

TEST_CASE("euler of an orthogonal symplectic has zero squeezings") {
  const auto w = random_passive(3, 11);
  const auto s = passive_embed(w);
  const auto res = euler(s);
  CHECK(res.squeezings.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("euler reconstruction and factor structure") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_symplectic(2, 1.0, seed);
    const auto res = euler(s);
    CHECK(is_orthogonal_symplectic(res.o.entries));
    CHECK(is_orthogonal_symplectic(res.v.entries));
    Vec mid(4);
    mid << std::exp(res.squeezings(0)), std::exp(res.squeezings(1)),
        std::exp(-res.squeezings(0)), std::exp(-res.squeezings(1));
    const Mat rec = res.o.entries * mid.asDiagonal() * res.v.entries;
    CHECK(operator_norm(Mat(rec - s.entries)) <=
          1e-9 * operator_norm(s.entries));
    // squeezings descending, max matches the top singular value
    CHECK(res.squeezings(0) >= res.squeezings(1));
    CHECK(std::abs(operator_norm(s.entries) -
                   std::exp(res.squeezings.cwiseAbs().maxCoeff())) <=
          1e-10 * operator_norm(s.entries));
  }
}

TEST_CASE("euler rejects non-symplectic input") {
  SymplecticMatrix fake;
  fake.n = 1;
  fake.entries = 2.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(euler(fake), NotSymplectic);
}

TEST_CASE("nearest orthogonal symplectic") {
  const auto w = random_passive(2, 31);
  const auto already = passive_embed(w);
  const auto self = nearest_orthogonal_symplectic(already);
  CHECK(operator_norm(Mat(self.entries - already.entries)) <= 1e-9);

  // distance bound for mild squeezing
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = random_symplectic(2, 0.1, 500 + seed);
    const auto near = nearest_orthogonal_symplectic(s);
    const double dist = operator_norm(Mat(s.entries - near.entries));
    const double bound = std::sqrt(operator_norm(
        Mat(s.entries.transpose() * s.entries - Mat::Identity(4, 4))));
    CHECK(dist <= bound + 1e-12);
  }

  // closed-form single-mode case: diag(e^1/2, e^-1/2) -> I
  Mat m(2, 2);
  m << std::exp(0.5), 0.0, 0.0, std::exp(-0.5);
  const auto near = nearest_orthogonal_symplectic(make_symplectic(m));
  CHECK(operator_norm(Mat(near.entries - Mat::Identity(2, 2))) <= 1e-10);
  const double dist = operator_norm(Mat(m - near.entries));
  CHECK(std::abs(dist - (std::exp(0.5) - 1.0)) <= 1e-10);
  CHECK(dist <= std::sqrt(std::exp(1.0) - 1.0));
}

TEST_CASE("passive_extract inverts passive_embed") {
  const auto w = random_passive(3, 77);
  const auto back = passive_extract(passive_embed(w));
  CHECK(operator_norm(CMat(back.entries - w.entries)) <= 1e-12);
}
