#pragma once

#include <span>

#include "bml/common.hpp"
#include "bml/moments.hpp"
#include "bml/symplectic.hpp"

namespace bml::oracle {

using moments::LadderOp;
using symplectic::PassiveUnitary;
using symplectic::SymplecticMatrix;

/// Ryser's formula with Gray-code updates, cost 2^m * m. Dim <= 24.
cplx permanent(const CMat& m);

/// Leibniz expansion over all permutations, cost m! * m. Reference
/// oracle for the Ryser path; dim <= 10.
cplx permanent_naive(const CMat& m);

/// Amplitude <f| U_W |g> = perm(W_{f,g}) / sqrt(prod f_i! prod g_j!)
/// where W_{f,g} repeats row i f_i times and column j g_j times.
/// Requires |f|_1 = |g|_1 <= 20.
cplx passive_fock_overlap(const PassiveUnitary& w, const FockVector& f,
                          const FockVector& g);

struct PermCheckResult {
  double lhs = 0.0;  // perm(I + eps E) / (b!)^n
  double rhs = 0.0;  // 1 - eps b n / (1 - eps b n)
  bool holds = false;
};

/// Draws E with entries uniform in [-1, 1] and evaluates the permanent
/// perturbation inequality for the bn x bn all-identity block matrix.
/// Requires b, n >= 1, b*n <= 8, eps < 1/(bn).
PermCheckResult perm_perturbation_check(int b, int n, double eps,
                                        std::uint64_t seed);

/// Dense state vector on n modes truncated to `cutoff` levels per mode.
/// Index convention: mode 0 is the slowest axis.
struct TruncatedState {
  int n = 0;
  int cutoff = 0;
  CVec amplitudes;

  std::size_t index_of(const FockVector& f) const;
  /// Relative amplitude mass on the top two levels of any mode.
  double leakage() const;
};

inline constexpr double kLeakTol = 1e-8;

TruncatedState truncated_fock(const FockVector& f, int cutoff);

struct SuperpositionTerm {
  FockVector occ;
  cplx amp;
};

/// Normalized superposition of Fock basis states.
TruncatedState truncated_superposition(std::span<const SuperpositionTerm> terms,
                                       int n, int cutoff);

/// Fock-space matrix of the passive Gaussian unitary given by W,
/// exp(i sum_jk G_jk a^dag_j a_k) with G = -i log W.
CMat passive_unitary_truncated(const PassiveUnitary& w, int cutoff);

/// Fock-space matrix of the Gaussian unitary given by S, built as the
/// product of its Euler factors (passive, per-mode squeeze, passive).
CMat gaussian_unitary_truncated(const SymplecticMatrix& s, int cutoff);

TruncatedState evolve(const CMat& u, const TruncatedState& psi);

/// <psi| op_1 ... op_k |psi> by applying truncated ladder matrices.
/// Throws CutoffTooSmall if any application leaks past the tolerance.
cplx moment_bruteforce(const TruncatedState& psi,
                       std::span<const LadderOp> word);

/// Quadrature-word variant; indices in [0, 2n) with x first, p second.
cplx moment_bruteforce_quad(const TruncatedState& psi,
                            std::span<const int> quad_word);

}  // namespace bml::oracle
