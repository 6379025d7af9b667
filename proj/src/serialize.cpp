#include "bml/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bml::io {

json complex_to_json(cplx z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

cplx complex_from_json(const json& j) {
  return {j.at("re").get<double>(), j.at("im").get<double>()};
}

json complex_matrix_to_json(const CMat& m, int n) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return json{{"n", n}, {"entries", std::move(rows)}};
}

CMat complex_matrix_from_json(const json& j, int* n_out) {
  const json& rows = j.at("entries");
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  if (nr == 0) throw Error("empty matrix");
  const Eigen::Index nc = static_cast<Eigen::Index>(rows.at(0).size());
  CMat m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    if (static_cast<Eigen::Index>(rows.at(r).size()) != nc)
      throw Error("ragged matrix rows");
    for (Eigen::Index c = 0; c < nc; ++c)
      m(r, c) = complex_from_json(rows.at(r).at(c));
  }
  if (n_out) *n_out = j.at("n").get<int>();
  return m;
}

json real_matrix_to_json(const Mat& m, int n) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return json{{"n", n}, {"entries", std::move(rows)}};
}

Mat real_matrix_from_json(const json& j, int* n_out) {
  const json& rows = j.at("entries");
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  if (nr == 0) throw Error("empty matrix");
  const Eigen::Index nc = static_cast<Eigen::Index>(rows.at(0).size());
  Mat m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index c = 0; c < nc; ++c)
      m(r, c) = rows.at(r).at(c).get<double>();
  if (n_out) *n_out = j.at("n").get<int>();
  return m;
}

json sigma_to_json(const moments::SigmaMoment& m) {
  json j = complex_matrix_to_json(m.entries, m.n);
  j["kind"] = "sigma";
  j["t"] = m.t;
  return j;
}

moments::SigmaMoment sigma_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "sigma")
    throw Error("expected sigma moment file");
  moments::SigmaMoment m;
  m.t = j.at("t").get<int>();
  m.entries = complex_matrix_from_json(j, &m.n);
  return m;
}

json lambda_to_json(const moments::LambdaMoment& m) {
  json j = complex_matrix_to_json(m.entries, m.n);
  j["kind"] = "lambda";
  j["t"] = m.t;
  return j;
}

moments::LambdaMoment lambda_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "lambda")
    throw Error("expected lambda moment file");
  moments::LambdaMoment m;
  m.t = j.at("t").get<int>();
  m.entries = complex_matrix_from_json(j, &m.n);
  return m;
}

json instance_to_json(const Instance& inst) {
  json j;
  j["n"] = inst.n;
  j["f"] = inst.f.occ;
  j["mode"] = inst.active ? "active" : "passive";
  if (inst.active)
    j["transform"] = real_matrix_to_json(inst.s->entries, inst.n);
  else
    j["transform"] = complex_matrix_to_json(inst.w->entries, inst.n);
  j["seed"] = inst.seed;
  j["metadata"] = inst.metadata.is_null() ? json::object() : inst.metadata;
  return j;
}

Instance instance_from_json(const json& j) {
  Instance inst;
  inst.n = j.at("n").get<int>();
  inst.f = FockVector(j.at("f").get<std::vector<int>>());
  inst.active = j.at("mode").get<std::string>() == "active";
  if (inst.active)
    inst.s = symplectic::make_symplectic(
        real_matrix_from_json(j.at("transform")));
  else
    inst.w =
        symplectic::make_passive(complex_matrix_from_json(j.at("transform")));
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.metadata = j.value("metadata", json::object());
  if (inst.f.modes() != inst.n) throw Error("instance n / f mismatch");
  return inst;
}

json superposition_to_json(const SuperpositionSpec& spec) {
  json terms = json::array();
  for (const auto& term : spec.terms)
    terms.push_back(json{{"occ", term.occ.occ},
                         {"amp", complex_to_json(term.amp)}});
  return json{{"terms", std::move(terms)}};
}

SuperpositionSpec superposition_from_json(const json& j) {
  SuperpositionSpec spec;
  for (const json& t : j.at("terms")) {
    oracle::SuperpositionTerm term;
    term.occ = FockVector(t.at("occ").get<std::vector<int>>());
    term.amp = complex_from_json(t.at("amp"));
    spec.terms.push_back(std::move(term));
  }
  if (spec.terms.empty()) throw Error("superposition needs at least one term");
  spec.n = spec.terms.front().occ.modes();
  for (const auto& term : spec.terms)
    if (term.occ.modes() != spec.n) throw Error("inconsistent mode counts");
  return spec;
}

namespace {

json diagnostics_to_json(const learner::Diagnostics& d) {
  json j;
  j["eigenvalue_gaps"] = d.eigenvalue_gaps;
  j["schmidt_spectra"] = d.schmidt_spectra;
  j["polar_correction_norm"] = d.polar_correction_norm;
  if (!d.nu_residuals.empty()) j["nu_residuals"] = d.nu_residuals;
  return j;
}

}  // namespace

json learn_passive_to_json(const learner::LearnResultPassive& r) {
  json j;
  j["V"] = complex_matrix_to_json(r.v.entries, r.v.n);
  j["g"] = r.g.occ;
  json blocks = json::array();
  for (auto [b, e] : r.block_partition) blocks.push_back(json::array({b, e}));
  j["diagnostics"] = diagnostics_to_json(r.diagnostics);
  j["diagnostics"]["block_partition"] = std::move(blocks);
  return j;
}

json learn_active_to_json(const learner::LearnResultActive& r) {
  json j;
  j["Q"] = real_matrix_to_json(r.q.entries, r.q.n);
  j["g"] = r.g.occ;
  j["R"] = real_matrix_to_json(r.r.entries, r.r.n);
  j["diagnostics"] = diagnostics_to_json(r.diagnostics);
  return j;
}

namespace {

json spec_to_json(const invariants::InvariantSpec& spec) {
  return json{{"s", spec.s},
              {"pi", spec.pi},
              {"kind", spec.kind == invariants::InvariantKind::Contraction
                           ? "contraction"
                           : "spectrum"}};
}

json spectrum_to_json(const std::vector<cplx>& spectrum) {
  json arr = json::array();
  for (cplx z : spectrum) arr.push_back(complex_to_json(z));
  return arr;
}

}  // namespace

json witness_to_json(const invariants::WitnessReport& w) {
  json j;
  j["spec"] = spec_to_json(w.spec);
  if (w.spec.kind == invariants::InvariantKind::Contraction) {
    j["valueA"] = complex_to_json(w.value_a);
    j["valueB"] = complex_to_json(w.value_b);
  } else {
    j["valueA"] = spectrum_to_json(w.spectrum_a);
    j["valueB"] = spectrum_to_json(w.spectrum_b);
  }
  j["gap"] = w.gap;
  return j;
}

json invariant_table_to_json(const std::vector<invariants::InvariantSpec>& specs,
                             const invariants::MomentSet& moments) {
  json table = json::array();
  for (const auto& spec : specs) {
    const auto gamma = invariants::gamma_tensor(moments, spec.s);
    json row;
    row["spec"] = spec_to_json(spec);
    if (spec.kind == invariants::InvariantKind::Contraction)
      row["value"] = complex_to_json(invariants::theta_contraction(gamma, spec.pi));
    else
      row["value"] = spectrum_to_json(invariants::eigen_invariants(gamma, spec.pi));
    table.push_back(std::move(row));
  }
  return table;
}

json budget_to_json(const measurement::SampleBudget& b, const json& inputs) {
  json j;
  j["N1"] = measurement::to_decimal_string(b.n1);
  j["N2"] = measurement::to_decimal_string(b.n2);
  j["exact"] = b.exact;
  j["overflowed"] = b.overflowed;
  j["N1_approx"] = b.n1_approx;
  j["N2_approx"] = b.n2_approx;
  j["inputs"] = inputs;
  return j;
}

std::string correlator_samples_to_csv(
    const std::vector<measurement::CorrelatorSample>& samples) {
  std::string out = "# schema=1\nprobe_index,i,j,value,shots\n";
  char buf[128];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g\n", s.unitary_index,
                  s.i, s.j, s.value, s.shots);
    out += buf;
  }
  return out;
}

std::vector<measurement::CorrelatorSample> correlator_samples_from_csv(
    const std::string& text) {
  std::vector<measurement::CorrelatorSample> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("probe_index", 0) == 0)
      continue;
    measurement::CorrelatorSample s;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf", &s.unitary_index, &s.i,
                    &s.j, &s.value, &s.shots) != 5)
      throw Error("malformed sample row: " + line);
    out.push_back(s);
  }
  return out;
}

std::string dump_artifact(const json& j) { return j.dump(2) + "\n"; }

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void save_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << dump_artifact(j);
}

}  // namespace bml::io
