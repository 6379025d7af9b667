#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bml/common.hpp"
#include "bml/invariants.hpp"
#include "bml/learner.hpp"
#include "bml/measurement.hpp"
#include "bml/moments.hpp"
#include "bml/oracle.hpp"
#include "bml/symplectic.hpp"

namespace bml::io {

using json = nlohmann::json;

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

/// {"n": modes, "entries": [[{"re","im"}, ..], ..]} row-major.
json complex_matrix_to_json(const CMat& m, int n);
CMat complex_matrix_from_json(const json& j, int* n_out = nullptr);

/// Real matrices use plain floats.
json real_matrix_to_json(const Mat& m, int n);
Mat real_matrix_from_json(const json& j, int* n_out = nullptr);

json sigma_to_json(const moments::SigmaMoment& m);
moments::SigmaMoment sigma_from_json(const json& j);
json lambda_to_json(const moments::LambdaMoment& m);
moments::LambdaMoment lambda_from_json(const json& j);

/// A generated problem instance: the hidden state U |f>.
struct Instance {
  int n = 0;
  FockVector f;
  bool active = false;
  std::optional<symplectic::PassiveUnitary> w;
  std::optional<symplectic::SymplecticMatrix> s;
  std::uint64_t seed = 0;
  json metadata;
};

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

/// {"terms": [{"occ": [ints], "amp": {"re","im"}}, ..]}
struct SuperpositionSpec {
  int n = 0;
  std::vector<oracle::SuperpositionTerm> terms;
};

json superposition_to_json(const SuperpositionSpec& spec);
SuperpositionSpec superposition_from_json(const json& j);

json learn_passive_to_json(const learner::LearnResultPassive& r);
json learn_active_to_json(const learner::LearnResultActive& r);

json witness_to_json(const invariants::WitnessReport& w);
json invariant_table_to_json(const std::vector<invariants::InvariantSpec>& specs,
                             const invariants::MomentSet& moments);

json budget_to_json(const measurement::SampleBudget& b, const json& inputs);

/// Sample dumps: CSV with columns probe_index,i,j,value,shots.
std::string correlator_samples_to_csv(
    const std::vector<measurement::CorrelatorSample>& samples);
std::vector<measurement::CorrelatorSample> correlator_samples_from_csv(
    const std::string& text);

std::string dump_artifact(const json& j);  // stable two-space indent + newline
json load_file(const std::string& path);
void save_file(const std::string& path, const json& j);

}  // namespace bml::io
