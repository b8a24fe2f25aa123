#include "sqreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqreg/datagen.hpp"
#include "sqreg/diagnostics.hpp"
#include "sqreg/smoothing.hpp"

namespace sqreg::solver {

namespace {
constexpr long kResidualRefreshPeriod = 1000;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

void Config::validate() const {
  pen.validate();
  if (!std::isfinite(c) || c <= 0.0) throw std::invalid_argument("config: c must be > 0");
  if (!std::isfinite(sigma0) || sigma0 <= 0.0) {
    throw std::invalid_argument("config: sigma0 must be > 0");
  }
  if (!std::isfinite(beta) || beta <= 0.0) throw std::invalid_argument("config: beta must be > 0");
  if (burn_in < max_iters && beta < std::sqrt(3.0) - 1e-12) {
    throw std::invalid_argument(
        "config: beta must be >= sqrt(3) while the sigma schedule is active");
  }
  if (max_iters < 1) throw std::invalid_argument("config: max_iters must be >= 1");
  if (!std::isfinite(eps1) || eps1 <= 0.0 || !std::isfinite(eps2) || eps2 <= 0.0) {
    throw std::invalid_argument("config: eps1 and eps2 must be > 0");
  }
  if (burn_in < 0) throw std::invalid_argument("config: burn_in must be >= 0");
  if (trace_stride < 1) throw std::invalid_argument("config: trace_stride must be >= 1");
  if (!std::isfinite(support_threshold) || support_threshold <= 0.0) {
    throw std::invalid_argument("config: support_threshold must be > 0");
  }
}

double sigma_schedule(long k, const Config& cfg) {
  if (k < cfg.burn_in) return cfg.sigma0;
  return std::max(cfg.sigma0, cfg.c * std::sqrt(static_cast<double>(k + 1)));
}

double mu_schedule(double sigma, const Config& cfg) { return cfg.beta / sigma; }

State init_state(const ProblemInstance& prob, const Config& cfg) {
  State st;
  st.w = Eigen::VectorXd::Zero(prob.P());
  st.z = Eigen::VectorXd::Zero(prob.n());
  st.psi = Eigen::VectorXd::Zero(prob.n());
  st.r = Eigen::VectorXd::Zero(prob.n());
  st.sigma = sigma_schedule(0, cfg);
  st.mu = mu_schedule(st.sigma, cfg);
  st.k = 0;
  return st;
}

double w_coordinate_target(const ProblemInstance& prob, const State& st, int p,
                           double sigma) {
  const Eigen::VectorXd u = prob.y - st.z - st.psi / sigma - st.r;
  return st.w(p) + prob.X.col(p).dot(u) / prob.col_sqnorms(p);
}

double w_sweep(const ProblemInstance& prob, State& st, double sigma,
               const penalty::Params& pen) {
  Eigen::VectorXd u = prob.y - st.z - st.psi / sigma - st.r;
  const double n = static_cast<double>(prob.n());
  double dw_sq = 0.0;
  for (int p = 0; p < prob.P(); ++p) {
    const double csq = prob.col_sqnorms(p);
    const double a = st.w(p) + prob.X.col(p).dot(u) / csq;
    const double t = n / (sigma * csq);
    const double wnew = penalty::prox(a, pen, t);
    const double delta = wnew - st.w(p);
    if (delta != 0.0) {
      st.w(p) = wnew;
      st.r += delta * prob.X.col(p);
      u -= delta * prob.X.col(p);
      dw_sq += delta * delta;
    }
  }
  return dw_sq;
}

double z_update(const ProblemInstance& prob, State& st, double sigma, double mu) {
  const double shift = (prob.tau - 0.5) / sigma;
  const double rho = 1.0 / (2.0 * sigma);
  double dz_sq = 0.0;
  for (int i = 0; i < prob.n(); ++i) {
    const double alpha = prob.y(i) - st.r(i) - st.psi(i) / sigma - shift;
    const double znew = smoothing::prox_smoothed_abs(alpha, rho, mu);
    const double delta = znew - st.z(i);
    st.z(i) = znew;
    dz_sq += delta * delta;
  }
  return dz_sq;
}

double dual_update(const ProblemInstance& prob, State& st, double sigma) {
  double dpsi_sq = 0.0;
  for (int i = 0; i < prob.n(); ++i) {
    const double step = sigma * (st.z(i) + st.r(i) - prob.y(i));
    st.psi(i) += step;
    dpsi_sq += step * step;
  }
  return dpsi_sq;
}

bool stopping_check(const ProblemInstance& prob, const State& prev, const State& cur,
                    const Config& cfg) {
  const double n = static_cast<double>(prob.n());
  const double P = static_cast<double>(prob.P());

  const Eigen::VectorXd resid = cur.z + cur.r - prob.y;
  const double feas_rhs =
      std::sqrt(n) * cfg.eps1 +
      cfg.eps2 * std::max({cur.r.norm(), cur.z.norm(), prob.y.norm()});
  if (resid.norm() > feas_rhs) return false;

  const double dw_norm = (cur.w - prev.w).norm();
  const double xtdz_norm = (prob.X.transpose() * (cur.z - prev.z)).norm();
  const double dual_lhs = cur.sigma * (P * prob.max_col_sqnorm * dw_norm + xtdz_norm);
  const double dual_rhs =
      std::sqrt(P) * cfg.eps1 + cfg.eps2 * (prob.X.transpose() * cur.psi).norm();
  return dual_lhs <= dual_rhs;
}

SolveResult solve(const ProblemInstance& prob, const Config& cfg, const Truth* truth,
                  const Observer* observer) {
  cfg.validate();

  SolveResult result;
  State st = init_state(prob, cfg);
  State prev = st;

  const double v = static_cast<double>(prob.P()) * prob.max_col_norm;
  const double sigma_threshold = diag::descent_sigma_threshold(prob, cfg.pen);

  double prev_dz_sq = 0.0;
  double mu_two_back = st.mu;
  long last_recorded = -1;

  auto record = [&](double dw_sq, double dz_sq, double dpsi_sq) {
    IterationRecord rec;
    rec.k = st.k;
    rec.sigma = st.sigma;
    rec.mu = st.mu;
    rec.objective = diag::objective(prob, cfg.pen, st.w, &st.r);
    rec.smoothed_lagrangian = diag::smoothed_lagrangian(prob, cfg.pen, st.w, st.z, st.psi,
                                                        st.sigma, st.mu, &st.r);
    rec.exact_lagrangian =
        diag::exact_lagrangian(prob, cfg.pen, st.w, st.z, st.psi, st.sigma, &st.r);
    rec.primal_res = (st.z + st.r - prob.y).norm();
    rec.dw_sq = dw_sq;
    rec.dz_sq = dz_sq;
    rec.dpsi_sq = dpsi_sq;
    // The init state does not satisfy the z-stationarity identity the
    // dual-drift bound rests on, so the first transition has no contract.
    rec.lemma7_slack = st.k <= 1 ? kNaN
                                 : diag::dual_step_slack(dpsi_sq, dz_sq, prev.mu, st.mu,
                                                         prob.n());
    rec.subgrad_bound = diag::stationarity_gap_bound(
        std::sqrt(dw_sq), std::sqrt(dz_sq), prev.sigma, st.sigma, st.mu, prob.n(), v);
    rec.mse = truth ? (st.w - truth->w_true).squaredNorm() : kNaN;
    rec.accuracy = truth ? datagen::support_accuracy(st.w, truth->active_set,
                                                     cfg.support_threshold)
                         : kNaN;
    result.trace.push_back(rec);
    last_recorded = st.k;
  };

  for (long k = 0; k < cfg.max_iters; ++k) {
    prev = st;
    const double sigma = sigma_schedule(k, cfg);
    const double mu = mu_schedule(sigma, cfg);

    const double dw_sq = w_sweep(prob, st, sigma, cfg.pen);
    const double dz_sq = z_update(prob, st, sigma, mu);
    const double dpsi_sq = dual_update(prob, st, sigma);

    st.sigma = sigma;
    st.mu = mu;
    st.k = k + 1;

    if (result.threshold_iteration < 0 && sigma > sigma_threshold) {
      result.threshold_iteration = st.k;
    }

    if (observer) {
      IterationView view;
      view.k = st.k;
      view.prev = &prev;
      view.cur = &st;
      view.dw_sq = dw_sq;
      view.dz_sq = dz_sq;
      view.dpsi_sq = dpsi_sq;
      view.prev_dz_sq = prev_dz_sq;
      view.mu_two_back = mu_two_back;
      (*observer)(view);
    }

    const bool stop = stopping_check(prob, prev, st, cfg);
    if ((st.k - 1) % cfg.trace_stride == 0 || stop || st.k == cfg.max_iters) {
      if (st.k != last_recorded) record(dw_sq, dz_sq, dpsi_sq);
    }

    mu_two_back = prev.mu;
    prev_dz_sq = dz_sq;

    if (stop) {
      result.termination = Termination::Converged;
      break;
    }

    // Rebuild the residual cache periodically so incremental drift cannot
    // accumulate over long runs.
    if (st.k % kResidualRefreshPeriod == 0) st.r = prob.X * st.w;
  }

  result.w = st.w;
  result.z = st.z;
  result.psi = st.psi;
  result.iterations = st.k;
  return result;
}

}  // namespace sqreg::solver
