#pragma once

#include <span>
#include <utility>

#include "bml/common.hpp"
#include "bml/symplectic.hpp"

namespace bml::moments {

using symplectic::PassiveUnitary;
using symplectic::SymplecticMatrix;

/// Moment matrix in the ladder basis: sigma^(t) is n^t x n^t with
/// entry (i1..it; j1..jt) = <a_i1 .. a_it a^dag_j1 .. a^dag_jt>.
struct SigmaMoment {
  int t = 1;  // degree, 1 or 2
  int n = 0;
  CMat entries;
};

/// Moment matrix in the quadrature basis: lambda^(t) is (2n)^t x (2n)^t
/// with entry (I1..It; J1..Jt) = <r_I1 .. r_It r_J1 .. r_Jt> for
/// r = (x_1..x_n, p_1..p_n).
struct LambdaMoment {
  int t = 1;
  int n = 0;
  CMat entries;
};

enum class NoiseModel { UniformEntry, GaussianEntry, AdversarialEigvec };

struct NoiseSpec {
  double epsilon = 0.0;  // operator-norm bound of the added perturbation
  NoiseModel model = NoiseModel::GaussianEntry;
  std::uint64_t seed = 0;
};

/// One ladder operator; dag marks a creation operator.
struct LadderOp {
  int mode = 0;
  bool dag = false;
};

/// <f| op_1 ... op_k |f> evaluated by per-mode ladder action on the
/// occupations. Exact: the result is an integer (or zero). Word length
/// is capped at 8.
cplx fock_expectation(const FockVector& f, std::span<const LadderOp> word);

/// Quadrature-word expectation <f| r_I1 ... r_Ik |f>, expanded into
/// ladder words via x = (a + a^dag)/sqrt2, p = i(a^dag - a)/sqrt2.
cplx fock_quadrature_expectation(const FockVector& f,
                                 std::span<const int> quad_word);

SigmaMoment sigma_fock(const FockVector& f, int t);
LambdaMoment lambda_fock(const FockVector& f, int t);

/// sigma -> W^(ox t) sigma W^(dag ox t); trace preserved.
SigmaMoment transform_sigma(const PassiveUnitary& w, const SigmaMoment& sigma);

/// lambda -> S^(ox t) lambda (S^T)^(ox t).
LambdaMoment transform_lambda(const SymplecticMatrix& s,
                              const LambdaMoment& lam);

/// Basis conversion of both degrees at once (the degree-2 formula needs
/// n from a consistent pair).
std::pair<SigmaMoment, SigmaMoment> lambda_to_sigma(const LambdaMoment& lam1,
                                                    const LambdaMoment& lam2);

/// m + epsilon * E with E drawn per model, Hermitized, and scaled to
/// unit operator norm.
CMat add_noise(const CMat& m, const NoiseSpec& spec);
SigmaMoment add_noise(const SigmaMoment& m, const NoiseSpec& spec);
LambdaMoment add_noise(const LambdaMoment& m, const NoiseSpec& spec);

}  // namespace bml::moments
