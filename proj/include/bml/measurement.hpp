#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bml/common.hpp"
#include "bml/moments.hpp"
#include "bml/symplectic.hpp"

namespace bml::measurement {

using moments::SigmaMoment;
using symplectic::PassiveUnitary;
using symplectic::SymplecticMatrix;

/// The hidden state U |f> with U a passive or general Gaussian unitary.
struct GaussianFockState {
  FockVector f;
  std::optional<PassiveUnitary> w;
  std::optional<SymplecticMatrix> s;

  bool active() const { return s.has_value(); }
  int modes() const { return f.modes(); }
};

/// Noisy estimate of one diagonal correlator of the probe-conjugated
/// degree-2 moment matrix. The measured observable a_i a_j a_i^dag
/// a_j^dag is Hermitian, so value is real.
struct CorrelatorSample {
  int unitary_index = 0;
  int i = 0;
  int j = 0;
  double value = 0.0;
  double shots = 1.0;
};

/// Same for the degree-1 diagonal (photon-number measurements).
struct NumberSample {
  int unitary_index = 0;
  int i = 0;
  double value = 0.0;
  double shots = 1.0;
};

struct SampleBudget {
  unsigned __int128 n1 = 0;
  unsigned __int128 n2 = 0;
  bool exact = false;       // integer arithmetic, no rounding
  bool overflowed = false;  // saturated at 2^128 - 1
  double n1_approx = 0.0;
  double n2_approx = 0.0;
};

std::string to_decimal_string(unsigned __int128 value);

/// 3 n^2 Haar probes; rank of the recovery system is verified by the
/// solver, not assumed.
std::vector<PassiveUnitary> default_probes(int n, std::uint64_t seed);

/// Exact ladder moments of the (optionally probe-conjugated) state.
SigmaMoment exact_sigma(const GaussianFockState& state, int t,
                        const PassiveUnitary* probe = nullptr);

/// Per-cell seeded Gaussian noise with standard deviation
/// variance_bound / sqrt(shots); variance_bound is (1+|f|_1)^t for
/// passive states and e^(2ts) (1+f_max)^t for active ones. shots may be
/// infinity for exact values.
std::vector<CorrelatorSample> simulate_correlators(
    const GaussianFockState& state, const std::vector<PassiveUnitary>& probes,
    double shots, std::uint64_t seed);

std::vector<NumberSample> simulate_number_moments(
    const GaussianFockState& state, const std::vector<PassiveUnitary>& probes,
    double shots, std::uint64_t seed);

/// Least-squares inversion of the probe expansion. Unknowns are
/// parametrized in the swap-symmetric Hermitian sector (bosonic
/// degree-2 moments live there); throws RankDeficient when the stacked
/// system does not determine them.
SigmaMoment recover_sigma2(const std::vector<CorrelatorSample>& samples,
                           const std::vector<PassiveUnitary>& probes);

SigmaMoment recover_sigma1(const std::vector<NumberSample>& samples,
                           const std::vector<PassiveUnitary>& probes);

/// N1 = ceil(c1 n^(9+2a) f_max^6 |f|_1), N2 = ceil(c2 n^(9+2a) f_max^2
/// |f|_1^2), clamped to >= 1. Exact when the exponents and prefactors
/// are integral.
SampleBudget sample_budget_passive(int n, int f_max, int l1, double alpha,
                                   double c1, double c2);

/// N1 = ceil(c1 n^(76+16a+b) f_max^98 e^(120 s)),
/// N2 = ceil(c2 n^(12+2a+b) f_max^11 e^(24 s)).
SampleBudget sample_budget_active(int n, int f_max, double s, double alpha,
                                  double beta, double c1, double c2);

}  // namespace bml::measurement
