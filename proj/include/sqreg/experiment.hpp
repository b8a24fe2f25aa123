#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqreg/baselines.hpp"
#include "sqreg/config.hpp"
#include "sqreg/csv.hpp"
#include "sqreg/datagen.hpp"
#include "sqreg/solver.hpp"

namespace sqreg::experiment {

enum class SolverKind { Siad, Hbad, VanillaAdmm, Subgradient };

struct SolverSpec {
  std::string name;
  SolverKind kind = SolverKind::Siad;
  solver::Config siad;                 // read when kind == Siad
  baselines::BaselineConfig baseline;  // read otherwise

  void validate() const;
};

struct ExperimentSpec {
  std::string name = "experiment";   // output-file prefix
  datagen::ScenarioConfig scenario;  // per-trial seed = base_seed + trial
  long trials = 1;
  std::uint64_t base_seed = 0;
  bool zero_response = false;  // replace y with zeros after generation
  bool export_trials = false;  // write each trial's data CSV + truth JSON
  std::vector<SolverSpec> solvers;

  void validate() const;  // throws ConfigError
};

// Interpret a parsed config: one [experiment] section plus one or more
// [solver.NAME] sections; rejects unknown keys.
ExperimentSpec parse_experiment(const config::Ini& ini, const std::string& default_name);
// parse_file + parse_experiment, named after the file's basename.
ExperimentSpec load_experiment(const std::string& path);

// Run one solver spec on one problem.
solver::SolveResult run_solver(const ProblemInstance& prob, const SolverSpec& spec,
                               const solver::Truth* truth);

struct RunResult {
  std::vector<std::string> trace_files;
  std::vector<csv::SummaryRow> summary;
  std::string summary_file;
};

// Dispatches trials to `threads` workers (0 picks the hardware count) and
// writes, via a single collector in trial order:
//   <out>/<name>_<solver>_trial<T>.csv        per-iteration traces
//   <out>/<name>_trial<T>_data.csv / _truth.json   when export_trials
//   <out>/<name>_summary.csv                  per-solver per-k trial means
// Output bytes depend only on the ExperimentSpec, never on the thread count.
RunResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                         int threads = 1);

}  // namespace sqreg::experiment
