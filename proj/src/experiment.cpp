#include "sqreg/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

namespace sqreg::experiment {

namespace {

SolverKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "siad") return SolverKind::Siad;
  if (s == "hbad") return SolverKind::Hbad;
  if (s == "vanilla_admm") return SolverKind::VanillaAdmm;
  if (s == "subgradient") return SolverKind::Subgradient;
  throw ConfigError(where + ": unknown solver kind '" + s +
                    "' (expected siad, hbad, vanilla_admm or subgradient)");
}

penalty::Params parse_penalty(const config::Ini& ini, const std::string& section) {
  penalty::Params pen;
  const std::string kind = ini.get_string(section, "penalty", "mcp");
  if (kind == "mcp") {
    pen.kind = penalty::Kind::MCP;
    pen.gamma = 2.1;
  } else if (kind == "scad") {
    pen.kind = penalty::Kind::SCAD;
    pen.gamma = 3.1;
  } else {
    throw ConfigError(section + ": unknown penalty '" + kind + "' (expected mcp or scad)");
  }
  pen.lambda = ini.get_double(section, "lambda", 0.055);
  pen.gamma = ini.get_double(section, "gamma", pen.gamma);
  return pen;
}

struct SharedDefaults {
  long max_iters = 30000;
  long trace_stride = 1;
  double eps1 = 1e-3;
  double eps2 = 1e-3;
  double support_threshold = 1e-2;
};

SolverSpec parse_solver(const config::Ini& ini, const std::string& section,
                        const std::string& name, const SharedDefaults& d) {
  SolverSpec spec;
  spec.name = name;
  spec.kind = parse_kind(ini.get_string(section, "kind", "siad"), section);

  const penalty::Params pen = parse_penalty(ini, section);
  const long max_iters = ini.get_long(section, "max_iters", d.max_iters);
  const long stride = ini.get_long(section, "trace_stride", d.trace_stride);
  const double eps1 = ini.get_double(section, "eps1", d.eps1);
  const double eps2 = ini.get_double(section, "eps2", d.eps2);
  const double support = ini.get_double(section, "support_threshold", d.support_threshold);

  if (spec.kind == SolverKind::Siad) {
    spec.siad.pen = pen;
    spec.siad.c = ini.get_double(section, "c", 0.5);
    spec.siad.beta = ini.get_double(section, "beta", std::sqrt(3.0));
    spec.siad.sigma0 = ini.get_double(section, "sigma0", 1.0);
    spec.siad.burn_in = ini.get_long(section, "burn_in", 0);
    spec.siad.max_iters = max_iters;
    spec.siad.eps1 = eps1;
    spec.siad.eps2 = eps2;
    spec.siad.trace_stride = stride;
    spec.siad.support_threshold = support;
  } else {
    spec.baseline.pen = pen;
    spec.baseline.max_iters = max_iters;
    spec.baseline.eps1 = eps1;
    spec.baseline.eps2 = eps2;
    spec.baseline.trace_stride = stride;
    spec.baseline.support_threshold = support;
    if (spec.kind == SolverKind::Hbad) {
      spec.baseline.variant = baselines::Variant::Hbad;
      spec.baseline.fixed_mu = ini.get_double(section, "fixed_mu");
      spec.baseline.fixed_sigma = ini.get_double(section, "fixed_sigma");
    } else if (spec.kind == SolverKind::VanillaAdmm) {
      spec.baseline.variant = baselines::Variant::VanillaAdmm;
      spec.baseline.fixed_sigma = ini.get_double(section, "fixed_sigma");
    } else {
      spec.baseline.variant = baselines::Variant::Subgradient;
      spec.baseline.step0 = ini.get_double(section, "step0", 0.1);
    }
  }
  return spec;
}

}  // namespace

void SolverSpec::validate() const {
  if (name.empty()) throw ConfigError("solver name must not be empty");
  try {
    if (kind == SolverKind::Siad) {
      siad.validate();
    } else {
      baseline.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver '" + name + "': " + e.what());
  }
}

void ExperimentSpec::validate() const {
  try {
    scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (solvers.empty()) throw ConfigError("need at least one [solver.NAME] section");
  std::set<std::string> names;
  for (const auto& s : solvers) {
    s.validate();
    if (!names.insert(s.name).second) {
      throw ConfigError("duplicate solver name '" + s.name + "'");
    }
  }
}

ExperimentSpec parse_experiment(const config::Ini& ini, const std::string& default_name) {
  ExperimentSpec spec;
  const std::string ex = "experiment";
  if (!ini.has_section(ex)) throw ConfigError("missing [experiment] section");

  spec.name = ini.get_string(ex, "name", default_name);

  const std::string scen = ini.get_string(ex, "scenario", "fixed_support");
  if (scen == "fixed_support") {
    spec.scenario.scenario = datagen::Scenario::FixedSupport;
    spec.scenario.n = 100;
    spec.scenario.P = 300;
  } else if (scen == "variable_support") {
    spec.scenario.scenario = datagen::Scenario::VariableSupport;
    spec.scenario.n = 200;
    spec.scenario.P = 100;
  } else {
    throw ConfigError("unknown scenario '" + scen +
                      "' (expected fixed_support or variable_support)");
  }
  spec.scenario.n = static_cast<int>(ini.get_long(ex, "n", spec.scenario.n));
  spec.scenario.P = static_cast<int>(ini.get_long(ex, "P", spec.scenario.P));
  spec.scenario.tau = ini.get_double(ex, "tau", 0.7);
  spec.scenario.s = static_cast<int>(ini.get_long(ex, "s", 5));
  spec.scenario.noise_scale = ini.get_double(ex, "noise_scale", 0.7);
  spec.scenario.xi_sd = ini.get_double(ex, "xi_sd", 1e-3);

  spec.trials = ini.get_long(ex, "trials", 1);
  spec.base_seed = ini.get_u64(ex, "base_seed", 0);
  spec.zero_response = ini.get_bool(ex, "zero_response", false);
  spec.export_trials = ini.get_bool(ex, "export_trials", false);

  SharedDefaults d;
  d.max_iters = ini.get_long(ex, "max_iters", d.max_iters);
  d.trace_stride = ini.get_long(ex, "trace_stride", d.trace_stride);
  d.eps1 = ini.get_double(ex, "eps1", d.eps1);
  d.eps2 = ini.get_double(ex, "eps2", d.eps2);
  d.support_threshold = ini.get_double(ex, "support_threshold", d.support_threshold);

  const std::string prefix = "solver.";
  for (const auto& section : ini.section_names()) {
    if (section.rfind(prefix, 0) != 0) {
      if (section != ex) throw ConfigError("unknown section [" + section + "]");
      continue;
    }
    const std::string name = section.substr(prefix.size());
    spec.solvers.push_back(parse_solver(ini, section, name, d));
  }

  ini.check_all_consumed();
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  const config::Ini ini = config::Ini::parse_file(path);
  return parse_experiment(ini, std::filesystem::path(path).stem().string());
}

solver::SolveResult run_solver(const ProblemInstance& prob, const SolverSpec& spec,
                               const solver::Truth* truth) {
  switch (spec.kind) {
    case SolverKind::Siad:
      return solver::solve(prob, spec.siad, truth);
    case SolverKind::Hbad:
      return baselines::hbad_solve(prob, spec.baseline, truth);
    case SolverKind::VanillaAdmm:
      return baselines::vanilla_admm_solve(prob, spec.baseline, truth);
    case SolverKind::Subgradient:
      return baselines::subgradient_solve(prob, spec.baseline, truth);
  }
  throw std::logic_error("run_solver: unreachable");
}

RunResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                         int threads) {
  spec.validate();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  struct TrialOutput {
    datagen::GeneratedTrial trial;
    std::vector<std::vector<solver::IterationRecord>> traces;  // per solver
  };
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(spec.trials));

  std::atomic<long> next_trial{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      const long t = next_trial.fetch_add(1);
      if (t >= spec.trials) return;
      try {
        datagen::ScenarioConfig scen = spec.scenario;
        scen.seed = spec.base_seed + static_cast<std::uint64_t>(t);
        TrialOutput& out = outputs[static_cast<std::size_t>(t)];
        out.trial = datagen::gen_trial(scen);
        if (spec.zero_response) out.trial.y.setZero();

        const ProblemInstance prob =
            ProblemInstance::make(out.trial.X, out.trial.y, scen.tau);
        solver::Truth truth{out.trial.w_true, out.trial.active_set};

        out.traces.reserve(spec.solvers.size());
        for (const auto& sv : spec.solvers) {
          out.traces.push_back(run_solver(prob, sv, &truth).trace);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  long nthreads = threads > 0 ? threads
                              : static_cast<long>(std::thread::hardware_concurrency());
  nthreads = std::max(1L, std::min(nthreads, spec.trials));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (long i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Single collector: all files written here, in trial-major order.
  RunResult result;
  const std::filesystem::path base(out_dir);
  for (long t = 0; t < spec.trials; ++t) {
    const TrialOutput& out = outputs[static_cast<std::size_t>(t)];
    if (spec.export_trials) {
      const std::string data_path =
          (base / (spec.name + "_trial" + std::to_string(t) + "_data.csv")).string();
      csv::write_problem_csv(data_path, out.trial.X, out.trial.y);
      result.trace_files.push_back(data_path);

      nlohmann::json truth_json;
      truth_json["tau"] = spec.scenario.tau;
      truth_json["seed"] = spec.base_seed + static_cast<std::uint64_t>(t);
      truth_json["w_true"] = std::vector<double>(
          out.trial.w_true.data(), out.trial.w_true.data() + out.trial.w_true.size());
      truth_json["active_set"] = out.trial.active_set;
      const std::string truth_path =
          (base / (spec.name + "_trial" + std::to_string(t) + "_truth.json")).string();
      std::ofstream tf(truth_path);
      if (!tf) throw IoError("cannot open for writing: " + truth_path);
      tf << truth_json.dump(2) << '\n';
      if (!tf.good()) throw IoError("write failed: " + truth_path);
      result.trace_files.push_back(truth_path);
    }
    for (std::size_t s = 0; s < spec.solvers.size(); ++s) {
      const std::string path =
          (base / (spec.name + "_" + spec.solvers[s].name + "_trial" + std::to_string(t) +
                   ".csv"))
              .string();
      csv::write_trace_csv(path, out.traces[s]);
      result.trace_files.push_back(path);
    }
  }

  // Trial means per solver per logged iteration, accumulated in trial order.
  for (std::size_t s = 0; s < spec.solvers.size(); ++s) {
    struct Acc {
      long count = 0;
      double mse_sum = 0.0;
      double acc_sum = 0.0;
    };
    std::map<long, Acc> by_k;
    for (long t = 0; t < spec.trials; ++t) {
      for (const auto& rec : outputs[static_cast<std::size_t>(t)].traces[s]) {
        Acc& a = by_k[rec.k];
        ++a.count;
        a.mse_sum += rec.mse;
        a.acc_sum += rec.accuracy;
      }
    }
    for (const auto& [k, a] : by_k) {
      csv::SummaryRow row;
      row.solver = spec.solvers[s].name;
      row.k = k;
      row.trials = a.count;
      row.mean_mse = a.mse_sum / static_cast<double>(a.count);
      row.mean_accuracy = a.acc_sum / static_cast<double>(a.count);
      result.summary.push_back(row);
    }
  }
  result.summary_file = (base / (spec.name + "_summary.csv")).string();
  csv::write_summary_csv(result.summary_file, result.summary);
  return result;
}

}  // namespace sqreg::experiment
