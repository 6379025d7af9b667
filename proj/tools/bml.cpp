// bml: generate, learn, verify, and probe bosonic Fock states acted on
// by Gaussian unitaries, via their degree-1 and degree-2 moment
// matrices. Subcommands: gen, learn, verify, invariants, sweep, budget.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bml/serialize.hpp"

using namespace bml;
using io::json;

namespace {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("BM_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

// ---------------------------------------------------------------- gen

struct GenOpts {
  int n = 0;
  std::string f_spec;
  std::string mode = "passive";
  double s_max = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenOpts& opt) {
  std::vector<int> occ;
  if (opt.f_spec.empty()) {
    occ.assign(opt.n, 0);
  } else {
    occ = parse_int_list(opt.f_spec);
  }
  if (static_cast<int>(occ.size()) != opt.n)
    return usage_error("--f must list exactly n occupations");
  for (int v : occ)
    if (v < 0) return usage_error("occupations must be non-negative");
  if (opt.mode != "passive" && opt.mode != "active")
    return usage_error("--mode must be passive or active");
  if (opt.s_max < 0.0) return usage_error("--s-max must be >= 0");

  io::Instance inst;
  inst.n = opt.n;
  inst.f = FockVector(occ);
  inst.seed = opt.seed;
  inst.active = opt.mode == "active";
  if (inst.active)
    inst.s = symplectic::random_symplectic(opt.n, opt.s_max, opt.seed);
  else
    inst.w = symplectic::random_passive(opt.n, opt.seed);
  inst.metadata = json{{"mode", opt.mode}, {"s_max", opt.s_max}};

  io::save_file(opt.out, io::instance_to_json(inst));
  log_info("wrote instance to " + opt.out);
  return 0;
}

// -------------------------------------------------------------- learn

struct LearnOpts {
  std::string instance_path;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::string noise_model = "gaussian-entry";
  std::uint64_t seed = 0;
  std::string out;
};

moments::NoiseModel parse_noise_model(const std::string& name) {
  if (name == "gaussian-entry") return moments::NoiseModel::GaussianEntry;
  if (name == "uniform-entry") return moments::NoiseModel::UniformEntry;
  if (name == "adversarial-eigvec")
    return moments::NoiseModel::AdversarialEigvec;
  throw Error("unknown noise model: " + name);
}

bool constant_occupations(const FockVector& f) {
  for (int v : f.occ)
    if (v != f.occ.front()) return false;
  return f.modes() > 0;
}

int run_learn(const LearnOpts& opt) {
  io::Instance inst;
  try {
    inst = io::instance_from_json(io::load_file(opt.instance_path));
  } catch (const std::exception& e) {
    return usage_error(std::string("bad instance file: ") + e.what());
  }
  moments::NoiseModel model;
  try {
    model = parse_noise_model(opt.noise_model);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  if (opt.eps1 < 0.0 || opt.eps2 < 0.0)
    return usage_error("noise levels must be >= 0");

  json result;
  try {
    if (!inst.active) {
      auto s1 = moments::transform_sigma(*inst.w,
                                         moments::sigma_fock(inst.f, 1));
      auto s2 = moments::transform_sigma(*inst.w,
                                         moments::sigma_fock(inst.f, 2));
      s1 = moments::add_noise(s1, {opt.eps1, model, mix_seed(opt.seed, 1)});
      s2 = moments::add_noise(s2, {opt.eps2, model, mix_seed(opt.seed, 2)});
      const auto res = learner::find_v_fock(s1, s2);
      result = io::learn_passive_to_json(res);

      const auto report = learner::align_unitary(res.v, *inst.w, res.g);
      result["residual_aligned"] = report.residual;

      const int f_max = inst.f.f_max();
      double bound;
      std::string bound_name;
      if (constant_occupations(inst.f) && opt.eps1 == 0.0 &&
          inst.f.occ.front() > 0) {
        const int b = inst.f.occ.front();
        bound = learner::bound_constant_fock(opt.eps2, inst.n, b);
        bound_name = "constant-occupation";
        if (!learner::fidelity_bound_applicable(opt.eps2, inst.n, b))
          result["note"] = "bound not applicable";
      } else {
        bound = learner::bound_mixed_fock(opt.eps1, opt.eps2, inst.n, f_max);
        bound_name = "mixed-occupation";
      }
      result["bound_value"] = bound;
      result["bound_name"] = bound_name;

      std::cout << "g = " << json(res.g.occ).dump()
                << "  residual = " << fmt17(report.residual) << "  "
                << bound_name << " bound = " << fmt17(bound)
                << (result.contains("note") ? "  [bound not applicable]" : "")
                << "\n";
    } else {
      auto l1 = moments::transform_lambda(*inst.s,
                                          moments::lambda_fock(inst.f, 1));
      auto l2 = moments::transform_lambda(*inst.s,
                                          moments::lambda_fock(inst.f, 2));
      l1 = moments::add_noise(l1, {opt.eps1, model, mix_seed(opt.seed, 1)});
      l2 = moments::add_noise(l2, {opt.eps2, model, mix_seed(opt.seed, 2)});
      const auto res = learner::find_q(l1, l2);
      result = io::learn_active_to_json(res);

      const auto report = learner::align_symplectic(res.q, *inst.s, res.g);
      result["residual_aligned"] = report.residual;
      result["bound_name"] = "n/a (asymptotic analysis only)";
      const auto rec2 =
          moments::transform_lambda(res.q, moments::lambda_fock(res.g, 2));
      const double rec_residual =
          operator_norm(CMat(rec2.entries - l2.entries)) /
          (1.0 + operator_norm(l2.entries));
      result["moment_reconstruction_residual"] = rec_residual;

      std::cout << "g = " << json(res.g.occ).dump()
                << "  residual = " << fmt17(report.residual)
                << "  moment reconstruction = " << fmt17(rec_residual)
                << "  bound = n/a (asymptotic analysis only)\n";
    }
  } catch (const Error& e) {
    const bool learner_failure =
        dynamic_cast<const InsufficientColumns*>(&e) ||
        dynamic_cast<const RoundingAmbiguous*>(&e) ||
        dynamic_cast<const NegativeOccupation*>(&e) ||
        dynamic_cast<const NotACovariance*>(&e);
    if (!opt.out.empty()) io::save_file(opt.out, json{{"error", e.what()}});
    std::cerr << "learner failed: " << e.what() << "\n";
    return learner_failure ? 3 : 2;
  }

  if (!opt.out.empty()) io::save_file(opt.out, result);
  return 0;
}

// ------------------------------------------------------------- verify

struct VerifyOpts {
  std::string instance_path;
  std::string result_path;
};

int run_verify(const VerifyOpts& opt) {
  io::Instance inst;
  json result;
  try {
    inst = io::instance_from_json(io::load_file(opt.instance_path));
    result = io::load_file(opt.result_path);
  } catch (const std::exception& e) {
    return usage_error(std::string("bad input file: ") + e.what());
  }

  const bool has_v = result.contains("V");
  const bool has_q = result.contains("Q");
  if (inst.active != has_q || inst.active == has_v) {
    std::cerr << "error: result kind does not match the instance mode\n";
    return 4;
  }
  if (!result.contains("g")) {
    std::cerr << "error: result lacks g\n";
    return 4;
  }

  json report;
  try {
    const FockVector g(result.at("g").get<std::vector<int>>());
    if (!inst.active) {
      const CMat v = io::complex_matrix_from_json(result.at("V"));
      if (v.rows() != inst.n) {
        std::cerr << "error: dimension mismatch between result and instance\n";
        return 4;
      }
      symplectic::PassiveUnitary rel;
      rel.n = inst.n;
      rel.entries = inst.w->entries.adjoint() * v;
      try {
        report["fidelity"] =
            std::abs(oracle::passive_fock_overlap(rel, inst.f, g));
      } catch (const PhotonNumberMismatch&) {
        report["fidelity"] = 0.0;
        report["note"] = "PhotonNumberMismatch: g is not a permutation of f";
      } catch (const TooManyPhotons&) {
        report["note"] = "permanent oracle inapplicable (|f|_1 > 20)";
      }
    } else {
      const Mat q = io::real_matrix_from_json(result.at("Q"));
      if (q.rows() != 2 * inst.n) {
        std::cerr << "error: dimension mismatch between result and instance\n";
        return 4;
      }
      const Mat gram_q = q * q.transpose();
      const Mat gram_s = inst.s->entries * inst.s->entries.transpose();
      report["gram_residual"] = operator_norm(Mat(gram_q - gram_s)) /
                                (1.0 + operator_norm(gram_s));
      const auto qs = symplectic::make_symplectic(q);
      for (int t : {1, 2}) {
        const auto truth = moments::transform_lambda(
            *inst.s, moments::lambda_fock(inst.f, t));
        const auto rec =
            moments::transform_lambda(qs, moments::lambda_fock(g, t));
        report[t == 1 ? "moment_residual_1" : "moment_residual_2"] =
            operator_norm(CMat(rec.entries - truth.entries)) /
            (1.0 + operator_norm(truth.entries));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: verification failed: " << e.what() << "\n";
    return 4;
  }

  std::cout << io::dump_artifact(report);
  return 0;
}

// --------------------------------------------------------- invariants

struct InvariantOpts {
  std::string state_a;
  std::string state_b;
  int budget = 4;
};

invariants::MomentSet load_moment_set(const std::string& path) {
  const json j = io::load_file(path);
  if (j.contains("transform")) {
    const io::Instance inst = io::instance_from_json(j);
    const auto s = inst.active ? *inst.s : symplectic::passive_embed(*inst.w);
    const auto l1 =
        moments::transform_lambda(s, moments::lambda_fock(inst.f, 1));
    const auto l2 =
        moments::transform_lambda(s, moments::lambda_fock(inst.f, 2));
    return invariants::moment_set_from_lambda(l1, l2);
  }
  if (j.contains("terms")) {
    const io::SuperpositionSpec spec = io::superposition_from_json(j);
    int max_occ = 0;
    for (const auto& term : spec.terms)
      max_occ = std::max(max_occ, term.occ.f_max());
    const int cutoff = max_occ + 8;
    const auto psi =
        oracle::truncated_superposition(spec.terms, spec.n, cutoff);
    return invariants::moment_set_from_truncated(psi);
  }
  throw IncompleteMoments(
      "state file is neither an instance nor a superposition");
}

int run_invariants(const InvariantOpts& opt) {
  try {
    const auto ma = load_moment_set(opt.state_a);
    if (opt.state_b.empty()) {
      const auto specs = invariants::enumerate_specs(opt.budget);
      std::cout << io::dump_artifact(io::invariant_table_to_json(specs, ma));
      return 0;
    }
    const auto mb = load_moment_set(opt.state_b);
    const auto witness =
        invariants::convertibility_witness(ma, mb, opt.budget);
    json out;
    if (witness.has_value()) {
      out["witness"] = io::witness_to_json(*witness);
      out["verdict"] = "not Gaussian convertible";
    } else {
      out["witness"] = nullptr;
      out["verdict"] = "no witness up to budget";
    }
    std::cout << io::dump_artifact(out);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}

// -------------------------------------------------------------- sweep

struct SweepOpts {
  std::string ns = "2";
  int b = 1;
  std::string f_spec;
  std::string eps1_list = "0";
  std::string eps2_list = "0";
  int seeds = 20;
  int threads = 1;
  std::uint64_t seed_base = 0;
  std::string out;
};

struct SweepTrial {
  int n = 0;
  std::vector<int> f;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::uint64_t seed = 0;
};

struct SweepRow {
  SweepTrial trial;
  double residual = std::nan("");
  double bound_value = 0.0;
  bool bound_holds = false;
  double fidelity = std::nan("");
  bool fidelity_present = false;
  long long wall_time_ms = 0;
  std::string error;
};

SweepRow run_trial(const SweepTrial& trial) {
  SweepRow row;
  row.trial = trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    const FockVector f(trial.f);
    const auto w = symplectic::random_passive(trial.n, trial.seed);
    auto s1 = moments::transform_sigma(w, moments::sigma_fock(f, 1));
    auto s2 = moments::transform_sigma(w, moments::sigma_fock(f, 2));
    s1 = moments::add_noise(
        s1, {trial.eps1, moments::NoiseModel::GaussianEntry,
             mix_seed(trial.seed, 101)});
    s2 = moments::add_noise(
        s2, {trial.eps2, moments::NoiseModel::GaussianEntry,
             mix_seed(trial.seed, 102)});
    const auto res = learner::find_v_fock(s1, s2);
    const auto report = learner::align_unitary(res.v, w, res.g);
    row.residual = report.residual;

    const int b = f.occ.empty() ? 0 : f.occ.front();
    if (constant_occupations(f) && trial.eps1 == 0.0 && b > 0)
      row.bound_value = learner::bound_constant_fock(trial.eps2, trial.n, b);
    else
      row.bound_value = learner::bound_mixed_fock(trial.eps1, trial.eps2,
                                                  trial.n, f.f_max());
    row.bound_holds = row.residual <= row.bound_value;
    if (trial.eps1 == 0.0 && trial.eps2 == 0.0)
      row.bound_holds = row.residual <= 1e-8;

    if (f.total() <= 20) {
      symplectic::PassiveUnitary rel;
      rel.n = trial.n;
      rel.entries = w.entries.adjoint() * res.v.entries;
      row.fidelity = std::abs(oracle::passive_fock_overlap(rel, f, res.g));
      row.fidelity_present = true;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return row;
}

int run_sweep(const SweepOpts& opt) {
  std::vector<int> ns;
  std::vector<double> eps1s, eps2s;
  try {
    ns = parse_int_list(opt.ns);
    eps1s = parse_double_list(opt.eps1_list);
    eps2s = parse_double_list(opt.eps2_list);
  } catch (const std::exception&) {
    return usage_error("malformed list flag");
  }
  if (ns.empty() || eps1s.empty() || eps2s.empty() || opt.seeds < 1)
    return usage_error("empty sweep grid");
  if (opt.threads < 1) return usage_error("--threads must be >= 1");
  if (opt.out.empty()) return usage_error("--out is required");

  // trials in canonical order: (n, f, eps1, eps2, seed)
  std::vector<SweepTrial> trials;
  for (int n : ns) {
    std::vector<int> f;
    if (!opt.f_spec.empty()) {
      f = parse_int_list(opt.f_spec);
      if (static_cast<int>(f.size()) != n)
        return usage_error("--f length must match every n in --ns");
    } else {
      f.assign(n, opt.b);
    }
    for (double e1 : eps1s)
      for (double e2 : eps2s)
        for (int k = 0; k < opt.seeds; ++k) {
          SweepTrial t;
          t.n = n;
          t.f = f;
          t.eps1 = e1;
          t.eps2 = e2;
          t.seed = mix_seed(opt.seed_base, trials.size());
          trials.push_back(std::move(t));
        }
  }

  std::vector<SweepRow> rows(trials.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= trials.size()) break;
      rows[k] = run_trial(trials[k]);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < opt.threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ofstream csv(opt.out, std::ios::binary);
  if (!csv) return usage_error("cannot write " + opt.out);
  csv << "# schema=1\n";
  csv << "seed,n,f,eps1,eps2,residual_aligned,bound_value,bound_holds,"
         "fidelity_oracle,wall_time_ms\n";
  std::size_t holds = 0, counted = 0;
  for (const auto& row : rows) {
    std::string f_enc;
    for (std::size_t i = 0; i < row.trial.f.size(); ++i) {
      if (i) f_enc += '|';
      f_enc += std::to_string(row.trial.f[i]);
    }
    csv << row.trial.seed << ',' << row.trial.n << ',' << f_enc << ','
        << fmt17(row.trial.eps1) << ',' << fmt17(row.trial.eps2) << ','
        << fmt17(row.residual) << ',' << fmt17(row.bound_value) << ','
        << (row.bound_holds ? "true" : "false") << ','
        << (row.fidelity_present ? fmt17(row.fidelity) : "") << ','
        << row.wall_time_ms << "\n";
    if (row.error.empty()) {
      ++counted;
      if (row.bound_holds) ++holds;
    }
  }
  std::cout << "bound_holds rate: " << holds << "/" << counted << " ("
            << fmt17(counted ? 100.0 * holds / counted : 0.0) << "%)\n";
  return 0;
}

// ------------------------------------------------------------- budget

struct BudgetOpts {
  std::string mode = "passive";
  int n = 1;
  int f_max = 0;
  int l1 = 0;
  double s = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  std::string out;
};

int run_budget(const BudgetOpts& opt) {
  measurement::SampleBudget budget;
  json inputs;
  try {
    if (opt.mode == "passive") {
      budget = measurement::sample_budget_passive(opt.n, opt.f_max, opt.l1,
                                                  opt.alpha, opt.c1, opt.c2);
      inputs = json{{"mode", "passive"}, {"n", opt.n},
                    {"f_max", opt.f_max}, {"l1", opt.l1},
                    {"alpha", opt.alpha}, {"c1", opt.c1},
                    {"c2", opt.c2}};
    } else if (opt.mode == "active") {
      budget = measurement::sample_budget_active(opt.n, opt.f_max, opt.s,
                                                 opt.alpha, opt.beta, opt.c1,
                                                 opt.c2);
      inputs = json{{"mode", "active"},   {"n", opt.n},
                    {"f_max", opt.f_max}, {"s", opt.s},
                    {"alpha", opt.alpha}, {"beta", opt.beta},
                    {"c1", opt.c1},       {"c2", opt.c2}};
    } else {
      return usage_error("--mode must be passive or active");
    }
  } catch (const PreconditionViolated& e) {
    return usage_error(e.what());
  }
  const json out = io::budget_to_json(budget, inputs);
  if (opt.out.empty())
    std::cout << io::dump_artifact(out);
  else
    io::save_file(opt.out, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment-based learning of bosonic Fock states under Gaussian "
               "unitaries"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate a problem instance");
  cmd_gen->add_option("--n", gen.n, "mode count")->required();
  cmd_gen->add_option("--f", gen.f_spec, "occupations, e.g. 1,1,2");
  cmd_gen->add_option("--mode", gen.mode, "passive | active");
  cmd_gen->add_option("--s-max", gen.s_max, "squeezing cap (active)");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("--out", gen.out, "output path")->required();

  LearnOpts learn;
  auto* cmd_learn =
      app.add_subcommand("learn", "run the learner on an instance");
  cmd_learn->add_option("--instance", learn.instance_path)->required();
  cmd_learn->add_option("--eps1", learn.eps1, "degree-1 moment noise");
  cmd_learn->add_option("--eps2", learn.eps2, "degree-2 moment noise");
  cmd_learn->add_option("--noise-model", learn.noise_model,
                        "gaussian-entry | uniform-entry | adversarial-eigvec");
  cmd_learn->add_option("--seed", learn.seed, "noise seed");
  cmd_learn->add_option("--out", learn.out, "result path");

  VerifyOpts verify;
  auto* cmd_verify =
      app.add_subcommand("verify", "verify a result against its instance");
  cmd_verify->add_option("--instance", verify.instance_path)->required();
  cmd_verify->add_option("--result", verify.result_path)->required();

  InvariantOpts inv;
  auto* cmd_inv = app.add_subcommand(
      "invariants", "invariant table or convertibility witness");
  cmd_inv->add_option("--state-a", inv.state_a)->required();
  cmd_inv->add_option("--state-b", inv.state_b);
  cmd_inv->add_option("--budget", inv.budget, "max total degree |s|");

  SweepOpts sweep;
  auto* cmd_sweep =
      app.add_subcommand("sweep", "bound-compliance sweep, CSV output");
  cmd_sweep->add_option("--ns", sweep.ns, "mode counts, e.g. 2,3,4");
  cmd_sweep->add_option("--b", sweep.b, "constant occupation");
  cmd_sweep->add_option("--f", sweep.f_spec, "explicit occupations");
  cmd_sweep->add_option("--eps1-list", sweep.eps1_list);
  cmd_sweep->add_option("--eps2-list", sweep.eps2_list);
  cmd_sweep->add_option("--seeds", sweep.seeds, "trials per grid point");
  cmd_sweep->add_option("--threads", sweep.threads);
  cmd_sweep->add_option("--seed-base", sweep.seed_base);
  cmd_sweep->add_option("--out", sweep.out, "CSV path")->required();

  BudgetOpts budget;
  auto* cmd_budget = app.add_subcommand("budget", "sample-count calculators");
  cmd_budget->add_option("--mode", budget.mode, "passive | active");
  cmd_budget->add_option("--n", budget.n)->required();
  cmd_budget->add_option("--f-max", budget.f_max);
  cmd_budget->add_option("--l1", budget.l1, "total boson number");
  cmd_budget->add_option("--s", budget.s, "max squeezing");
  cmd_budget->add_option("--alpha", budget.alpha);
  cmd_budget->add_option("--beta", budget.beta);
  cmd_budget->add_option("--c1", budget.c1);
  cmd_budget->add_option("--c2", budget.c2);
  cmd_budget->add_option("--out", budget.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_learn->parsed()) return run_learn(learn);
    if (cmd_verify->parsed()) return run_verify(verify);
    if (cmd_inv->parsed()) return run_invariants(inv);
    if (cmd_sweep->parsed()) return run_sweep(sweep);
    if (cmd_budget->parsed()) return run_budget(budget);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
