#pragma once

#include "sqreg/penalty.hpp"
#include "sqreg/problem.hpp"
#include "sqreg/solver.hpp"

namespace sqreg::baselines {

enum class Variant { Hbad, VanillaAdmm, Subgradient };

struct BaselineConfig {
  Variant variant = Variant::Hbad;
  penalty::Params pen;
  double fixed_mu = 0.1;     // Hbad: smoothing width held constant
  double fixed_sigma = 1.0;  // Hbad, VanillaAdmm: penalty parameter held constant
  double step0 = 0.1;        // Subgradient: step k is step0/sqrt(k+1)
  long max_iters = 30000;
  double eps1 = 1e-3;
  double eps2 = 1e-3;
  long trace_stride = 1;
  double support_threshold = 1e-2;

  void validate() const;  // throws std::invalid_argument
};

// Fixed-mu, fixed-sigma smoothing ADMM: exactly the solver loop with both
// schedules frozen (burn-in covering every iteration, sigma0 = fixed_sigma,
// beta = fixed_sigma*fixed_mu). Shares the solver's trace schema.
solver::SolveResult hbad_solve(const ProblemInstance& prob, const BaselineConfig& cfg,
                               const solver::Truth* truth = nullptr,
                               const solver::Observer* observer = nullptr);

// Two-block ADMM on the unsmoothed check loss: same coordinate w sweep, exact
// soft-threshold z step, fixed sigma. No convergence guarantee; the trace is
// recorded regardless. mu, smoothed_lagrangian, lemma7_slack and
// subgrad_bound columns are NaN (no smoothing path exists).
solver::SolveResult vanilla_admm_solve(const ProblemInstance& prob,
                                       const BaselineConfig& cfg,
                                       const solver::Truth* truth = nullptr);

// Plain decaying-step subgradient descent on the primal objective
//   (1/n) sum_i check_loss(y_i - x_i'w) + sum_p penalty(w_p),
// taking tau - 1/2 at check-loss kinks and 0 at the penalty kink. Runs to
// max_iters; z/dual trace columns are NaN.
solver::SolveResult subgradient_solve(const ProblemInstance& prob,
                                      const BaselineConfig& cfg,
                                      const solver::Truth* truth = nullptr);

}  // namespace sqreg::baselines
