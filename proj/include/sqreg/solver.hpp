#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "sqreg/penalty.hpp"
#include "sqreg/problem.hpp"

namespace sqreg::solver {

struct Config {
  penalty::Params pen;
  double c = 0.5;       // growth coefficient of the sigma schedule, > 0
  double beta = 1.7320508075688772;  // sigma*mu coupling; >= sqrt(3) when the schedule engages
  double sigma0 = 1.0;  // > 0
  long max_iters = 30000;
  double eps1 = 1e-3;   // > 0
  double eps2 = 1e-3;   // > 0
  long burn_in = 0;     // iterations with sigma frozen at sigma0; >= max_iters freezes forever
  long trace_stride = 1;
  double support_threshold = 1e-2;

  void validate() const;  // throws std::invalid_argument
};

// sigma for 0-based iteration k: sigma0 during burn-in, then max(sigma0, c*sqrt(k+1)).
double sigma_schedule(long k, const Config& cfg);
// mu = beta / sigma.
double mu_schedule(double sigma, const Config& cfg);

struct State {
  Eigen::VectorXd w;    // P
  Eigen::VectorXd z;    // n
  Eigen::VectorXd psi;  // n
  Eigen::VectorXd r;    // cached X*w, refreshed in full every 1000 iterations
  double sigma = 0.0;
  double mu = 0.0;
  long k = 0;  // completed iterations
};

State init_state(const ProblemInstance& prob, const Config& cfg);

// Prox target for coordinate p:
//   a_p = w_p + X_p' (y - z - psi/sigma - r) / ||X_p||^2,
// i.e. the anchor of the quadratic completed in w_p with every other block fixed.
double w_coordinate_target(const ProblemInstance& prob, const State& st, int p,
                           double sigma);

// One ascending pass p = 0..P-1: each coordinate moves to
// penalty_prox(a_p, t_p) with step t_p = n / (sigma * ||X_p||^2).
// Maintains the residual cache incrementally; returns ||dw||_2^2.
double w_sweep(const ProblemInstance& prob, State& st, double sigma,
               const penalty::Params& pen);

// Componentwise smoothed-loss prox at
//   alpha = (y - X w) - (psi + (tau - 1/2) 1) / sigma
// with shrinkage 1/(2*sigma) and width mu; returns ||dz||_2^2.
double z_update(const ProblemInstance& prob, State& st, double sigma, double mu);

// psi += sigma * (z + X w - y); returns ||dpsi||_2^2. After a z_update with
// matching sigma/mu this leaves psi = -h_grad(z, mu, tau) up to rounding.
double dual_update(const ProblemInstance& prob, State& st, double sigma);

// Two-part stopping rule (primal feasibility, dual-step magnitude):
//   ||z + Xw - y|| <= sqrt(n)*eps1 + eps2*max(||Xw||, ||z||, ||y||)
//   sigma*(P*max_p||X_p||^2*||dw|| + ||X'dz||) <= sqrt(P)*eps1 + eps2*||X'psi||
// Only w and z of prev are read.
bool stopping_check(const ProblemInstance& prob, const State& prev, const State& cur,
                    const Config& cfg);

struct IterationRecord {
  long k = 0;
  double sigma = 0.0, mu = 0.0;
  double objective = 0.0;  // (1/n) sum check_loss + penalty
  double smoothed_lagrangian = 0.0, exact_lagrangian = 0.0;
  double primal_res = 0.0;  // ||z + Xw - y||_2
  double dw_sq = 0.0, dz_sq = 0.0, dpsi_sq = 0.0;
  double lemma7_slack = 0.0;   // dual-step drift-bound slack; NaN on the first transition
  double subgrad_bound = 0.0;  // stationarity-gap bound; NaN where not defined
  double mse = 0.0, accuracy = 0.0;  // vs attached truth; NaN without one
};

enum class Termination { Converged, MaxIters };

struct Truth {
  Eigen::VectorXd w_true;
  std::vector<int> active_set;  // 0-based indices
};

// Observer snapshot, valid only during the callback. prev/cur are the states
// before and after the iteration that just completed.
struct IterationView {
  long k = 0;
  const State* prev = nullptr;
  const State* cur = nullptr;
  double dw_sq = 0.0, dz_sq = 0.0, dpsi_sq = 0.0;
  double prev_dz_sq = 0.0;  // ||dz||^2 of the previous iteration (0 before it exists)
  double mu_two_back = 0.0;  // mu two iterations back (schedule start value before that)
};
using Observer = std::function<void(const IterationView&)>;

struct SolveResult {
  Eigen::VectorXd w, z, psi;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::MaxIters;
  long iterations = 0;            // completed iterations
  long threshold_iteration = -1;  // first k with sigma > 2*n*rho/min_p||X_p||^2, -1 if never
};

// Single-loop smoothed ADMM with a time-increasing penalty parameter.
// Per iteration: schedule update, ascending w sweep, smoothed z prox, dual
// ascent, stopping rule. The trace records every trace_stride-th iteration
// plus the final one; the observer, when given, runs every iteration.
SolveResult solve(const ProblemInstance& prob, const Config& cfg,
                  const Truth* truth = nullptr, const Observer* observer = nullptr);

}  // namespace sqreg::solver
