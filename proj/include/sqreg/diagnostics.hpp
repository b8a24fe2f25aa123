#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "sqreg/penalty.hpp"
#include "sqreg/problem.hpp"
#include "sqreg/solver.hpp"

namespace sqreg::diag {

// (1/n) sum_i check_loss(y_i - (Xw)_i) + sum_p penalty(w_p).
// Pass Xw to reuse an existing residual cache; recomputed otherwise.
double objective(const ProblemInstance& prob, const penalty::Params& pen,
                 const Eigen::VectorXd& w, const Eigen::VectorXd* Xw = nullptr);

// sum_i check_loss(z_i) + n*sum_p penalty(w_p) + psi'(z+Xw-y)
//   + (sigma/2)*||z+Xw-y||_2^2.
double exact_lagrangian(const ProblemInstance& prob, const penalty::Params& pen,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& psi, double sigma,
                        const Eigen::VectorXd* Xw = nullptr);

// As exact_lagrangian with the check-loss sum replaced by its mu-smoothed
// version; exact <= smoothed <= exact + n*mu/4.
double smoothed_lagrangian(const ProblemInstance& prob, const penalty::Params& pen,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& psi, double sigma, double mu,
                           const Eigen::VectorXd* Xw = nullptr);

struct KKTResidual {
  double primal = 0.0;  // ||z + Xw - y||_inf
  double dual_w = 0.0;  // max_p dist(-(X'psi)_p, n * d(penalty)(w_p))
  double dual_z = 0.0;  // max_i dist(-psi_i, d(check_loss)(z_i))
};
KKTResidual kkt_residual(const ProblemInstance& prob, const penalty::Params& pen,
                         const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                         const Eigen::VectorXd& psi);

// Slack (RHS - LHS) of the dual-drift bound
//   ||dpsi||^2 <= ||dz||^2/(2*mu_cur^2) + (n^2/2)*((mu_prev-mu_cur)/mu_cur)^2,
// which holds whenever both flanking iterates satisfy the z-stationarity
// identity psi = -h_grad(z, mu, tau). Nonnegative slack means the bound held.
double dual_step_slack(double dpsi_sq, double dz_sq, double mu_prev, double mu_cur,
                       int n);

// sigma above which the per-sweep strong-convexity margin
//   xi = sigma*min_p||X_p||^2/(2n) - weak_convexity_modulus
// is positive, making the descent bound below meaningful.
double descent_sigma_threshold(const ProblemInstance& prob, const penalty::Params& pen);

struct DescentCheck {
  bool applicable = false;  // sigma over threshold and enough history
  double lhs = 0.0;         // smoothed_lagrangian(cur) - smoothed_lagrangian(prev)
  double rhs = 0.0;         // one-iteration bound on that change
  double xi = 0.0;          // strong-convexity margin used in rhs
};

// One-iteration bound on the smoothed-Lagrangian change:
//   lhs <= -xi*||dw||^2 + (sigma_cur/2)(1/beta^2 - 1)*||dz||^2
//          + ((sigma_cur-sigma_prev)/(2*beta^2))*prev_dz_sq
//          + (n^2/(2*sigma_cur))*((mu_prev-mu_cur)/mu_cur)^2
//          + (n^2*(sigma_cur-sigma_prev)/(2*sigma_prev^2))
//            * ((mu_two_back-mu_prev)/mu_prev)^2
// with beta = sigma_cur*mu_cur. Needs the previous iteration's ||dz||^2 and
// the mu two iterations back; throws std::invalid_argument when either is
// non-finite (insufficient history). Reports applicable=false below the
// sigma threshold.
DescentCheck descent_monitor(const ProblemInstance& prob, const penalty::Params& pen,
                             const solver::State& prev, const solver::State& cur,
                             double prev_dz_sq, double mu_two_back);

// Composite bound on the norm of the smoothed augmented-Lagrangian
// (sub)gradient at cur, with v = P * max_p ||X_p||_2 and beta = sigma_cur*mu_cur:
//   sigma_cur*v^2*||dw||
//   + (1/(2 beta) + sigma_cur/(2 beta) + v*(sigma_cur/(2 beta) + 1))*||dz||
//   + (v + 1 + 1/sigma_cur)*(sigma_cur - sigma_prev)*n/(2*sigma_cur).
double stationarity_gap_bound(double dw_norm, double dz_norm, double sigma_prev,
                              double sigma_cur, double mu_cur, int n, double v);
double stationarity_gap_bound(const ProblemInstance& prob, const solver::State& prev,
                              const solver::State& cur);

struct RateFit {
  long k_lo = 0, k_hi = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  long samples = 0;
};

// Ordinary least squares of log(value) on log(k) over points with k in
// [k_lo, k_hi] and value > 0. Throws std::invalid_argument with fewer than
// 10 usable points.
RateFit rate_fit_points(const std::vector<std::pair<double, double>>& k_value,
                        long k_lo, long k_hi);

// Same over a solver trace, with the fitted quantity pulled out of each record.
RateFit rate_fit(const std::vector<solver::IterationRecord>& trace,
                 const std::function<double(const solver::IterationRecord&)>& quantity,
                 long k_lo, long k_hi);

}  // namespace sqreg::diag
