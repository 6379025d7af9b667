#pragma once

#include "bml/common.hpp"

namespace bml::symplectic {

/// Canonical symplectic form in (x_1..x_n, p_1..p_n) ordering:
/// Omega = [[0, I], [-I, 0]]. Vacuum covariance is I/2 in this
/// convention (x = (a + a^dag)/sqrt(2)).
Mat omega(int n);

struct SymplecticMatrix {
  int n = 0;
  Mat entries;        // 2n x 2n, S Omega S^T = Omega
  double s_max = 0;  // log of the largest singular value
};

struct PassiveUnitary {
  int n = 0;
  CMat entries;  // n x n, W^dag W = I
};

struct WilliamsonResult {
  Vec nu;  // symplectic eigenvalues, ascending
  SymplecticMatrix r;
};

struct EulerResult {
  SymplecticMatrix o;  // orthogonal symplectic
  Vec squeezings;      // descending; middle factor diag(e^s, e^-s)
  SymplecticMatrix v;  // orthogonal symplectic
};

bool is_symplectic(const Mat& s);
bool is_orthogonal_symplectic(const Mat& s);

/// Validating constructors; throw NotSymplectic / NonUnitaryInput.
SymplecticMatrix make_symplectic(Mat entries);
PassiveUnitary make_passive(CMat entries);

/// U(n) -> K(n) = Sp(2n,R) /\ O(2n):
/// rho(W) = [[Re W, -Im W], [Im W, Re W]].
SymplecticMatrix passive_embed(const PassiveUnitary& w);

/// Inverse of passive_embed; input must be orthogonal symplectic.
PassiveUnitary passive_extract(const SymplecticMatrix& o);

/// S^-1 = -Omega S^T Omega (exact for symplectic S).
Mat symplectic_inverse(const Mat& s);

/// Haar-distributed unitary via QR of a complex Gaussian matrix with
/// the R-diagonal phase fix. Deterministic given seed.
PassiveUnitary random_passive(int n, std::uint64_t seed);

/// rho(U1) diag(e^s, e^-s) rho(U2) with U1, U2 Haar and each s_i
/// uniform in [-s_max, s_max].
SymplecticMatrix random_symplectic(int n, double s_max, std::uint64_t seed);

/// M = R diag(nu, nu) R^T with R symplectic, nu ascending. The nu are
/// the positive eigenvalues of i Omega M. M must be symmetric
/// positive-definite.
WilliamsonResult williamson(const Mat& m);

/// S = O diag(e^s, e^-s) V with O, V orthogonal symplectic.
EulerResult euler(const SymplecticMatrix& s);

/// O V from the Euler factors; satisfies
/// |S - OV| <= sqrt(|S^T S - I|) in operator norm.
SymplecticMatrix nearest_orthogonal_symplectic(const SymplecticMatrix& s);

}  // namespace bml::symplectic
