#pragma once

#include <utility>
#include <vector>

#include "bml/common.hpp"
#include "bml/moments.hpp"
#include "bml/symplectic.hpp"

namespace bml::learner {

using moments::LambdaMoment;
using moments::SigmaMoment;
using symplectic::PassiveUnitary;
using symplectic::SymplecticMatrix;

// Schmidt-coefficient floor for harvesting a candidate column.
inline constexpr double kTauSchmidt = 1e-6;
// Residual-norm threshold for accepting a column as independent.
inline constexpr double kTauRank = 0.5;
// Distance to a half-integer boundary below which eigenvalue rounding
// is rejected as ambiguous.
inline constexpr double kTauRound = 1e-6;
// Symplectic eigenvalues may sit below the vacuum value 1/2 by at most
// this much before the input is rejected as unphysical.
inline constexpr double kCovarianceSlack = 0.05;

struct Diagnostics {
  std::vector<double> eigenvalue_gaps;
  std::vector<std::vector<double>> schmidt_spectra;
  double polar_correction_norm = 0.0;
  std::vector<double> nu_residuals;
};

struct LearnResultPassive {
  PassiveUnitary v;
  FockVector g;  // ascending
  std::vector<std::pair<int, int>> block_partition;  // [begin, end) per block
  Diagnostics diagnostics;
};

struct LearnResultActive {
  SymplecticMatrix q;
  FockVector g;
  SymplecticMatrix r;  // Williamson factor of Re lambda^(1)
  Diagnostics diagnostics;
};

struct AlignmentReport {
  CVec phi;            // diagonal of Phi, indexed by reference column
  std::vector<int> p;  // column j of the candidate matches reference p[j]
  double residual = 0.0;
};

/// Recover the passive unitary from the degree-2 ladder moment of
/// U_W |b..b>. Returns the identity when b = 0.
PassiveUnitary find_v(const SigmaMoment& sigma2, int b,
                      Diagnostics* diag = nullptr);

/// Recover (V, g) from the degree-1 and degree-2 ladder moments of
/// U_W |f> for arbitrary f: diagonalize sigma^(1) - I, split into
/// blocks of equal rounded occupation, run find_v per block.
LearnResultPassive find_v_fock(const SigmaMoment& sigma1,
                               const SigmaMoment& sigma2);

/// Recover (Q, g) from the quadrature moments of U_S |f>: Williamson
/// on Re lambda^(1), undo the active part, convert to ladder moments,
/// delegate to find_v_fock, reapply the active part.
LearnResultActive find_q(const LambdaMoment& lambda1,
                         const LambdaMoment& lambda2);

/// Min over diagonal unitaries Phi and permutations P of |V - W Phi P|
/// (operator norm). Exhaustive over permutations for n <= 8, optimal
/// bipartite matching on |<w_i|v_j>| beyond. g is a hint only.
AlignmentReport align_unitary(const PassiveUnitary& v, const PassiveUnitary& w,
                              const FockVector& g = FockVector{});

/// Same quotient for symplectic matrices, with Phi P embedded via
/// the passive isomorphism; matching runs on the 2x2 mode sub-blocks
/// of S^-1 Q.
AlignmentReport align_symplectic(const SymplecticMatrix& q,
                                 const SymplecticMatrix& s,
                                 const FockVector& g = FockVector{});

// Recovery guarantees for bounded moment noise, pinned from the
// analysis: residual and fidelity bounds for the constant-occupation
// case, and the residual bound for the mixed-occupation case.
double bound_constant_fock(double eps, int n, int b);
bool fidelity_bound_applicable(double eps, int n, int b);
double fidelity_bound_constant_fock(double eps, int n, int b);
double bound_mixed_fock(double eps1, double eps2, int n, int f_max);
double fidelity_bound_mixed_fock(double eps1, double eps2, int n, int f_max);

}  // namespace bml::learner
