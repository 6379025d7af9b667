#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bml {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

constexpr cplx I_UNIT{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define BML_ERROR_TYPE(Name)                \
  struct Name : Error {                     \
    using Error::Error;                     \
    Name() : Error(#Name) {}                \
  }

BML_ERROR_TYPE(NonUnitaryInput);
BML_ERROR_TYPE(NotSymmetric);
BML_ERROR_TYPE(NotPositiveDefinite);
BML_ERROR_TYPE(NotSymplectic);
BML_ERROR_TYPE(DimensionMismatch);
BML_ERROR_TYPE(WordTooLong);
BML_ERROR_TYPE(NonHermitianInput);
BML_ERROR_TYPE(InsufficientColumns);
BML_ERROR_TYPE(NegativeOccupation);
BML_ERROR_TYPE(RoundingAmbiguous);
BML_ERROR_TYPE(NotACovariance);
BML_ERROR_TYPE(TooLarge);
BML_ERROR_TYPE(PhotonNumberMismatch);
BML_ERROR_TYPE(TooManyPhotons);
BML_ERROR_TYPE(PreconditionViolated);
BML_ERROR_TYPE(CutoffTooSmall);
BML_ERROR_TYPE(MissingMoment);
BML_ERROR_TYPE(OddTotalDegree);
BML_ERROR_TYPE(DegreeMismatch);
BML_ERROR_TYPE(RankDeficient);
BML_ERROR_TYPE(IncompleteMoments);

#undef BML_ERROR_TYPE

// Scale-relative tolerances shared by the validity predicates.
inline double tol_sym(double scale) { return 1e-9 * (1.0 + scale); }
inline double tol_rec(double scale) { return 1e-8 * (1.0 + scale); }

/// Deterministic 64-bit RNG. The raw stream is std::mt19937_64; the
/// derived distributions are implemented explicitly so output is
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal via Box-Muller (no cached spare, so the call
  // sequence maps 2 raw draws to 1 variate, deterministically)
  double gauss() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  cplx cgauss() {
    double re = gauss();
    double im = gauss();
    return {re, im};
  }

  std::uint64_t uniform_int(std::uint64_t bound) {  // in [0, bound)
    return eng_() % bound;
  }

 private:
  std::mt19937_64 eng_;
};

/// Occupation numbers of an n-mode Fock state.
struct FockVector {
  std::vector<int> occ;

  FockVector() = default;
  explicit FockVector(std::vector<int> o) : occ(std::move(o)) {
    for (int v : occ)
      if (v < 0) throw NegativeOccupation();
  }

  int modes() const { return static_cast<int>(occ.size()); }
  int f_max() const {
    int m = 0;
    for (int v : occ) m = std::max(m, v);
    return m;
  }
  int total() const {  // ||f||_1
    int t = 0;
    for (int v : occ) t += v;
    return t;
  }
  bool operator==(const FockVector& other) const { return occ == other.occ; }
};

// splitmix64: used to derive statistically independent per-cell seeds
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Largest singular value. Full SVD below dimension 256, power
/// iteration on M^dag M (1e-12 relative convergence) above.
double operator_norm(const CMat& m);
double operator_norm(const Mat& m);

/// Hungarian algorithm on a square cost matrix, O(n^3);
/// returns assignment[row] = column minimizing the total cost.
std::vector<int> min_cost_assignment(const Mat& cost);

CMat kron(const CMat& a, const CMat& b);
Mat kron(const Mat& a, const Mat& b);

}  // namespace bml
