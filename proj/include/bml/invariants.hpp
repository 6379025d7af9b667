#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bml/common.hpp"
#include "bml/moments.hpp"
#include "bml/oracle.hpp"
#include "bml/symplectic.hpp"

namespace bml::invariants {

using moments::LambdaMoment;
using symplectic::SymplecticMatrix;

inline constexpr double kTauWitRel = 1e-6;
inline constexpr double kTauWitAbs = 1e-9;
inline constexpr int kMaxTotalDegree = 8;

/// Central moment tensor Sigma^(t): (2n)^t complex entries stored flat,
/// row-major multi-index over quadrature indices in [0, 2n).
struct MomentTensor {
  int degree = 0;
  int n = 0;
  CVec entries;
};

enum class InvariantKind { Contraction, Spectrum };

struct InvariantSpec {
  std::vector<int> s;   // factor degrees, |s| even
  std::vector<int> pi;  // permutation of |s| (contraction) or |s|/2 (spectrum)
  InvariantKind kind = InvariantKind::Contraction;
};

/// Moments of one state up to degree 4 (tensors[d-1] has degree d).
struct MomentSet {
  int n = 0;
  std::vector<MomentTensor> tensors;

  const MomentTensor& degree(int d) const;
};

/// Degrees 2 and 4 from exact quadrature moment matrices; odd degrees
/// vanish for Fock-state inputs.
MomentSet moment_set_from_lambda(const LambdaMoment& lam1,
                                 const LambdaMoment& lam2);

/// Degrees 1..4 evaluated on a truncated Fock-space state. Rejects
/// states with nonzero first moments (the tensors would not be central).
MomentSet moment_set_from_truncated(const oracle::TruncatedState& psi);

/// Sigma^(t) -> S^(ox t) Sigma^(t), one index contraction per axis.
MomentTensor transform_tensor(const SymplecticMatrix& s,
                              const MomentTensor& t);
MomentSet transform_moment_set(const SymplecticMatrix& s, const MomentSet& m);

/// Gamma^(s) = tensor product of Sigma^(s_i) in the listed order.
MomentTensor gamma_tensor(const MomentSet& moments, std::span<const int> s);

/// <theta^(ox |s|/2)| W_pi |Gamma> with theta_ij = Omega_ij.
cplx theta_contraction(const MomentTensor& gamma, std::span<const int> pi);

/// Eigenvalue multiset of (i Omega)^(ox m) W_pi Gamma-bar, m = degree/2,
/// sorted lexicographically by (Re, Im).
std::vector<cplx> eigen_invariants(const MomentTensor& gamma,
                                   std::span<const int> pi);

/// Optimal-matching distance between canonical spectra (max matched
/// pairwise distance under a min-sum assignment).
double spectrum_distance(const std::vector<cplx>& a,
                         const std::vector<cplx>& b);

/// Canonical spec enumeration for totals 2, 4, .., budget: partitions
/// into parts <= 4, contraction permutations deduplicated under
/// theta-pair and equal-degree factor-block symmetry, spectrum
/// permutations of the row indices.
std::vector<InvariantSpec> enumerate_specs(int budget);

struct WitnessReport {
  InvariantSpec spec;
  cplx value_a, value_b;                 // contraction kind
  std::vector<cplx> spectrum_a, spectrum_b;  // spectrum kind
  double gap = 0.0;
};

/// First enumerated spec whose values differ by more than the witness
/// tolerance, or nullopt if all agree up to the budget.
std::optional<WitnessReport> convertibility_witness(const MomentSet& a,
                                                    const MomentSet& b,
                                                    int budget);

}  // namespace bml::invariants
