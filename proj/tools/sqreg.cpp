#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqreg/baselines.hpp"
#include "sqreg/csv.hpp"
#include "sqreg/diagnostics.hpp"
#include "sqreg/errors.hpp"
#include "sqreg/experiment.hpp"
#include "sqreg/penalty.hpp"
#include "sqreg/solver.hpp"

namespace {

using sqreg::experiment::SolverKind;
using sqreg::experiment::SolverSpec;

struct SolverFlags {
  std::string penalty = "mcp";
  double lambda = 0.055;
  double gamma = -1.0;  // -1: pick the penalty's default
  double tau = 0.7;
  double c = 0.5;
  double beta = std::sqrt(3.0);
  double sigma0 = 1.0;
  long burn_in = 0;
  long iters = 30000;
  long stride = 1;
  double eps1 = 1e-3;
  double eps2 = 1e-3;
  double step0 = 0.1;
  double fixed_mu = 0.1;
  double fixed_sigma = 1.0;
  double support_threshold = 1e-2;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--penalty", f.penalty, "Penalty kind: mcp or scad")
      ->check(CLI::IsMember({"mcp", "scad"}));
  cmd->add_option("--lambda", f.lambda, "Penalty weight");
  cmd->add_option("--gamma", f.gamma, "Penalty concavity span (default 2.1 mcp, 3.1 scad)");
  cmd->add_option("--tau", f.tau, "Quantile level in (0,1)");
  cmd->add_option("--c", f.c, "Penalty-parameter growth coefficient");
  cmd->add_option("--beta", f.beta, "sigma*mu coupling constant");
  cmd->add_option("--sigma0", f.sigma0, "Initial penalty parameter");
  cmd->add_option("--burn-in", f.burn_in, "Iterations with sigma frozen at sigma0");
  cmd->add_option("--iters", f.iters, "Maximum iterations");
  cmd->add_option("--stride", f.stride, "Trace recording stride");
  cmd->add_option("--eps1", f.eps1, "Stopping tolerance (absolute)");
  cmd->add_option("--eps2", f.eps2, "Stopping tolerance (relative)");
  cmd->add_option("--step0", f.step0, "Subgradient initial step size");
  cmd->add_option("--fixed-mu", f.fixed_mu, "Fixed smoothing width (hbad)");
  cmd->add_option("--fixed-sigma", f.fixed_sigma, "Fixed penalty parameter (hbad/vanilla)");
  cmd->add_option("--support-threshold", f.support_threshold,
                  "|w| cutoff for support recovery accuracy");
}

sqreg::penalty::Params make_penalty(const SolverFlags& f) {
  sqreg::penalty::Params pen;
  pen.kind = f.penalty == "scad" ? sqreg::penalty::Kind::SCAD : sqreg::penalty::Kind::MCP;
  pen.gamma = f.gamma > 0.0 ? f.gamma : (pen.kind == sqreg::penalty::Kind::SCAD ? 3.1 : 2.1);
  pen.lambda = f.lambda;
  return pen;
}

SolverSpec make_solver_spec(const std::string& kind_name, const SolverFlags& f) {
  SolverSpec spec;
  spec.name = kind_name;
  const sqreg::penalty::Params pen = make_penalty(f);
  if (kind_name == "siad") {
    spec.kind = SolverKind::Siad;
    spec.siad.pen = pen;
    spec.siad.c = f.c;
    spec.siad.beta = f.beta;
    spec.siad.sigma0 = f.sigma0;
    spec.siad.burn_in = f.burn_in;
    spec.siad.max_iters = f.iters;
    spec.siad.eps1 = f.eps1;
    spec.siad.eps2 = f.eps2;
    spec.siad.trace_stride = f.stride;
    spec.siad.support_threshold = f.support_threshold;
    return spec;
  }
  spec.baseline.pen = pen;
  spec.baseline.max_iters = f.iters;
  spec.baseline.eps1 = f.eps1;
  spec.baseline.eps2 = f.eps2;
  spec.baseline.trace_stride = f.stride;
  spec.baseline.support_threshold = f.support_threshold;
  spec.baseline.fixed_mu = f.fixed_mu;
  spec.baseline.fixed_sigma = f.fixed_sigma;
  spec.baseline.step0 = f.step0;
  if (kind_name == "hbad") {
    spec.kind = SolverKind::Hbad;
    spec.baseline.variant = sqreg::baselines::Variant::Hbad;
  } else if (kind_name == "vanilla_admm") {
    spec.kind = SolverKind::VanillaAdmm;
    spec.baseline.variant = sqreg::baselines::Variant::VanillaAdmm;
  } else if (kind_name == "subgradient") {
    spec.kind = SolverKind::Subgradient;
    spec.baseline.variant = sqreg::baselines::Variant::Subgradient;
  } else {
    throw sqreg::ConfigError("unknown solver kind '" + kind_name +
                             "' (expected siad, hbad, vanilla_admm or subgradient)");
  }
  return spec;
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw sqreg::IoError("cannot open for writing: " + out_path);
  out << text << '\n';
  if (!out.good()) throw sqreg::IoError("write failed: " + out_path);
}

int run_scenario(const std::string& config_path, const std::string& scenario_name,
                 const std::string& solvers_list, const SolverFlags& flags, int n, int P,
                 int s, long trials, unsigned long long seed, bool zero_response,
                 bool export_trials, const std::string& out_dir, int threads) {
  sqreg::experiment::ExperimentSpec spec;
  if (!config_path.empty()) {
    spec = sqreg::experiment::load_experiment(config_path);
  } else {
    spec.name = scenario_name;
    spec.scenario.scenario = scenario_name == "variable_support"
                                 ? sqreg::datagen::Scenario::VariableSupport
                                 : sqreg::datagen::Scenario::FixedSupport;
    if (scenario_name != "fixed_support" && scenario_name != "variable_support") {
      throw sqreg::ConfigError("unknown scenario '" + scenario_name + "'");
    }
    spec.scenario.n = n;
    spec.scenario.P = P;
    spec.scenario.s = s;
    spec.scenario.tau = flags.tau;
    spec.trials = trials;
    spec.base_seed = seed;
    spec.zero_response = zero_response;
    spec.export_trials = export_trials;

    std::string rest = solvers_list;
    while (!rest.empty()) {
      const std::size_t pos = rest.find(',');
      const std::string kind = rest.substr(0, pos);
      if (!kind.empty()) spec.solvers.push_back(make_solver_spec(kind, flags));
      if (pos == std::string::npos) break;
      rest = rest.substr(pos + 1);
    }
  }

  const auto result = sqreg::experiment::run_experiment(spec, out_dir, threads);
  std::cout << "wrote " << result.trace_files.size() << " trace file(s) and "
            << result.summary_file << '\n';
  return 0;
}

int run_solve(const std::string& input, const std::string& kind, const SolverFlags& flags,
              const std::string& out_path, const std::string& trace_path) {
  const sqreg::csv::LoadedProblem lp = sqreg::csv::read_problem_csv(input);
  const sqreg::ProblemInstance prob = sqreg::ProblemInstance::make(lp.X, lp.y, flags.tau);
  const SolverSpec spec = make_solver_spec(kind, flags);
  const sqreg::solver::SolveResult result =
      sqreg::experiment::run_solver(prob, spec, nullptr);

  nlohmann::json doc;
  doc["solver"] = kind;
  doc["termination"] =
      result.termination == sqreg::solver::Termination::Converged ? "converged"
                                                                  : "max_iters";
  doc["iterations"] = result.iterations;
  doc["threshold_iteration"] = result.threshold_iteration;
  doc["w"] = std::vector<double>(result.w.data(), result.w.data() + result.w.size());
  doc["objective"] = sqreg::diag::objective(prob, spec.kind == SolverKind::Siad
                                                      ? spec.siad.pen
                                                      : spec.baseline.pen,
                                            result.w);
  if (result.z.size() == prob.n() && result.psi.size() == prob.n()) {
    const sqreg::diag::KKTResidual kkt = sqreg::diag::kkt_residual(
        prob, spec.kind == SolverKind::Siad ? spec.siad.pen : spec.baseline.pen, result.w,
        result.z, result.psi);
    doc["kkt"] = {{"primal", kkt.primal}, {"dual_w", kkt.dual_w}, {"dual_z", kkt.dual_z}};
  } else {
    doc["kkt"] = nullptr;  // subgradient runs carry no splitting variables
  }

  if (!trace_path.empty()) sqreg::csv::write_trace_csv(trace_path, result.trace);
  write_text(out_path, doc.dump(2));
  return 0;
}

int run_diagnose(const std::string& trace_path, const std::string& quantity, long k_lo,
                 long k_hi, const std::string& out_path) {
  const auto trace = sqreg::csv::read_trace_csv(trace_path);

  nlohmann::json doc;
  doc["rows"] = trace.size();
  if (!trace.empty()) {
    doc["k_min"] = trace.front().k;
    doc["k_max"] = trace.back().k;
  }

  long slack_evaluated = 0, slack_violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  long sandwich_checked = 0;
  double max_sandwich_violation = 0.0;
  bool sigma_monotone = true, mu_monotone = true;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& rec = trace[i];
    if (std::isfinite(rec.lemma7_slack)) {
      ++slack_evaluated;
      min_slack = std::min(min_slack, rec.lemma7_slack);
      if (rec.lemma7_slack < -1e-8) ++slack_violations;
    }
    if (std::isfinite(rec.exact_lagrangian) && std::isfinite(rec.smoothed_lagrangian)) {
      ++sandwich_checked;
      max_sandwich_violation =
          std::max(max_sandwich_violation, rec.exact_lagrangian - rec.smoothed_lagrangian);
    }
    if (i > 0) {
      const auto& prev = trace[i - 1];
      if (std::isfinite(rec.sigma) && std::isfinite(prev.sigma) && rec.sigma < prev.sigma) {
        sigma_monotone = false;
      }
      if (std::isfinite(rec.mu) && std::isfinite(prev.mu) && rec.mu > prev.mu) {
        mu_monotone = false;
      }
    }
  }
  doc["dual_drift_bound"] = {
      {"evaluated", slack_evaluated},
      {"violations", slack_violations},
      {"min_slack", slack_evaluated ? nlohmann::json(min_slack) : nlohmann::json()}};
  doc["smoothing_gap"] = {{"checked", sandwich_checked},
                          {"max_exact_minus_smoothed", max_sandwich_violation}};
  doc["sigma_nondecreasing"] = sigma_monotone;
  doc["mu_nonincreasing"] = mu_monotone;

  if (!quantity.empty()) {
    static const std::map<std::string,
                          std::function<double(const sqreg::solver::IterationRecord&)>>
        extractors = {
            {"dw_sq", [](const auto& r) { return r.dw_sq; }},
            {"dz_sq", [](const auto& r) { return r.dz_sq; }},
            {"dpsi_sq", [](const auto& r) { return r.dpsi_sq; }},
            {"primal_res", [](const auto& r) { return r.primal_res; }},
            {"sigma_primal_sq",
             [](const auto& r) { return r.sigma * r.primal_res * r.primal_res; }},
            {"subgrad_bound", [](const auto& r) { return r.subgrad_bound; }},
            {"objective", [](const auto& r) { return r.objective; }},
            {"mse", [](const auto& r) { return r.mse; }},
        };
    const auto it = extractors.find(quantity);
    if (it == extractors.end()) {
      throw sqreg::ConfigError("unknown quantity '" + quantity + "' for rate fitting");
    }
    const sqreg::diag::RateFit fit = sqreg::diag::rate_fit(trace, it->second, k_lo, k_hi);
    doc["rate_fit"] = {{"quantity", quantity}, {"k_lo", fit.k_lo},
                       {"k_hi", fit.k_hi},     {"samples", fit.samples},
                       {"slope", fit.slope},   {"intercept", fit.intercept},
                       {"r2", fit.r2}};
  }

  write_text(out_path, doc.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-penalty quantile regression: solvers, benchmarks, diagnostics"};
  app.require_subcommand(1);

  // scenario
  auto* scenario = app.add_subcommand("scenario", "Generate synthetic trials and run solvers");
  std::string sc_config, sc_name = "fixed_support", sc_solvers = "siad";
  std::string sc_out = "out";
  SolverFlags sc_flags;
  int sc_n = -1, sc_P = -1, sc_s = 5, sc_threads = 0;
  long sc_trials = 1;
  unsigned long long sc_seed = 0;
  bool sc_zero = false, sc_export = false;
  scenario->add_option("--config", sc_config,
                       "Experiment config file (overrides the other flags)");
  scenario->add_option("--scenario", sc_name, "fixed_support or variable_support");
  scenario->add_option("--solvers", sc_solvers, "Comma-separated solver kinds");
  scenario->add_option("--n", sc_n, "Samples (default: scenario preset)");
  scenario->add_option("--P", sc_P, "Predictors (default: scenario preset)");
  scenario->add_option("--s", sc_s, "Active-set size (variable_support)");
  scenario->add_option("--trials", sc_trials, "Independent trials");
  scenario->add_option("--seed", sc_seed, "Base seed; trial t uses seed+t");
  scenario->add_option("--out", sc_out, "Output directory");
  scenario->add_option("--threads", sc_threads, "Worker threads (0 = hardware)");
  scenario->add_flag("--zero-response", sc_zero, "Force y to zero after generation");
  scenario->add_flag("--export-trials", sc_export, "Write trial data + truth sidecars");
  add_solver_flags(scenario, sc_flags);

  // solve
  auto* solve = app.add_subcommand("solve", "Run one solver on a CSV problem (y,x1..xP)");
  std::string sv_input, sv_kind = "siad", sv_out = "-", sv_trace;
  SolverFlags sv_flags;
  solve->add_option("--input", sv_input, "Problem CSV path")->required();
  solve->add_option("--solver", sv_kind, "siad, hbad, vanilla_admm or subgradient");
  solve->add_option("--out", sv_out, "Solution JSON path ('-' = stdout)");
  solve->add_option("--trace", sv_trace, "Also write the iteration trace CSV here");
  add_solver_flags(solve, sv_flags);

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Re-run monitors over a trace CSV");
  std::string dg_trace, dg_quantity, dg_out = "-";
  long dg_klo = 1000, dg_khi = 10000;
  diagnose->add_option("--trace", dg_trace, "Trace CSV path")->required();
  diagnose->add_option("--quantity", dg_quantity,
                       "Fit a log-log rate to this column (dw_sq, dz_sq, dpsi_sq, "
                       "primal_res, sigma_primal_sq, subgrad_bound, objective, mse)");
  diagnose->add_option("--k-lo", dg_klo, "Fit window lower bound");
  diagnose->add_option("--k-hi", dg_khi, "Fit window upper bound");
  diagnose->add_option("--out", dg_out, "Report JSON path ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (scenario->parsed()) {
      // Fall back to the scenario presets when size flags are omitted.
      const bool variable = sc_name == "variable_support";
      if (sc_n < 0) sc_n = variable ? 200 : 100;
      if (sc_P < 0) sc_P = variable ? 100 : 300;
      return run_scenario(sc_config, sc_name, sc_solvers, sc_flags, sc_n, sc_P, sc_s,
                          sc_trials, sc_seed, sc_zero, sc_export, sc_out, sc_threads);
    }
    if (solve->parsed()) {
      return run_solve(sv_input, sv_kind, sv_flags, sv_out, sv_trace);
    }
    return run_diagnose(dg_trace, dg_quantity, dg_klo, dg_khi, dg_out);
  } catch (const sqreg::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const sqreg::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const sqreg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
