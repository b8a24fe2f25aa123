#include "sqreg/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqreg/datagen.hpp"
#include "sqreg/diagnostics.hpp"
#include "sqreg/smoothing.hpp"

namespace sqreg::baselines {

namespace {
constexpr long kResidualRefreshPeriod = 1000;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

void BaselineConfig::validate() const {
  pen.validate();
  if (max_iters < 1) throw std::invalid_argument("baseline: max_iters must be >= 1");
  if (!std::isfinite(eps1) || eps1 <= 0.0 || !std::isfinite(eps2) || eps2 <= 0.0) {
    throw std::invalid_argument("baseline: eps1 and eps2 must be > 0");
  }
  if (trace_stride < 1) throw std::invalid_argument("baseline: trace_stride must be >= 1");
  if (!std::isfinite(support_threshold) || support_threshold <= 0.0) {
    throw std::invalid_argument("baseline: support_threshold must be > 0");
  }
  if (variant == Variant::Hbad && (!std::isfinite(fixed_mu) || fixed_mu <= 0.0)) {
    throw std::invalid_argument("baseline: hbad needs fixed_mu > 0");
  }
  if ((variant == Variant::Hbad || variant == Variant::VanillaAdmm) &&
      (!std::isfinite(fixed_sigma) || fixed_sigma <= 0.0)) {
    throw std::invalid_argument("baseline: fixed_sigma must be > 0");
  }
  if (variant == Variant::Subgradient && (!std::isfinite(step0) || step0 <= 0.0)) {
    throw std::invalid_argument("baseline: subgradient needs step0 > 0");
  }
}

solver::SolveResult hbad_solve(const ProblemInstance& prob, const BaselineConfig& cfg,
                               const solver::Truth* truth,
                               const solver::Observer* observer) {
  if (cfg.variant != Variant::Hbad) {
    throw std::invalid_argument("hbad_solve: config variant mismatch");
  }
  cfg.validate();
  solver::Config scfg;
  scfg.pen = cfg.pen;
  scfg.c = 1.0;  // inert: the burn-in covers every iteration
  scfg.beta = cfg.fixed_sigma * cfg.fixed_mu;
  scfg.sigma0 = cfg.fixed_sigma;
  scfg.max_iters = cfg.max_iters;
  scfg.eps1 = cfg.eps1;
  scfg.eps2 = cfg.eps2;
  scfg.burn_in = cfg.max_iters;
  scfg.trace_stride = cfg.trace_stride;
  scfg.support_threshold = cfg.support_threshold;
  return solver::solve(prob, scfg, truth, observer);
}

solver::SolveResult vanilla_admm_solve(const ProblemInstance& prob,
                                       const BaselineConfig& cfg,
                                       const solver::Truth* truth) {
  if (cfg.variant != Variant::VanillaAdmm) {
    throw std::invalid_argument("vanilla_admm_solve: config variant mismatch");
  }
  cfg.validate();

  const double sigma = cfg.fixed_sigma;
  solver::Config stop_cfg;  // stopping_check reads only the tolerances
  stop_cfg.eps1 = cfg.eps1;
  stop_cfg.eps2 = cfg.eps2;

  solver::SolveResult result;
  solver::State st;
  st.w = Eigen::VectorXd::Zero(prob.P());
  st.z = Eigen::VectorXd::Zero(prob.n());
  st.psi = Eigen::VectorXd::Zero(prob.n());
  st.r = Eigen::VectorXd::Zero(prob.n());
  st.sigma = sigma;
  st.mu = kNaN;
  solver::State prev = st;

  long last_recorded = -1;
  auto record = [&](double dw_sq, double dz_sq, double dpsi_sq) {
    solver::IterationRecord rec;
    rec.k = st.k;
    rec.sigma = sigma;
    rec.mu = kNaN;
    rec.objective = diag::objective(prob, cfg.pen, st.w, &st.r);
    rec.smoothed_lagrangian = kNaN;
    rec.exact_lagrangian =
        diag::exact_lagrangian(prob, cfg.pen, st.w, st.z, st.psi, sigma, &st.r);
    rec.primal_res = (st.z + st.r - prob.y).norm();
    rec.dw_sq = dw_sq;
    rec.dz_sq = dz_sq;
    rec.dpsi_sq = dpsi_sq;
    rec.lemma7_slack = kNaN;
    rec.subgrad_bound = kNaN;
    rec.mse = truth ? (st.w - truth->w_true).squaredNorm() : kNaN;
    rec.accuracy = truth ? datagen::support_accuracy(st.w, truth->active_set,
                                                     cfg.support_threshold)
                         : kNaN;
    result.trace.push_back(rec);
    last_recorded = st.k;
  };

  const double shift = (prob.tau - 0.5) / sigma;
  const double rho = 1.0 / (2.0 * sigma);
  for (long k = 0; k < cfg.max_iters; ++k) {
    prev = st;
    const double dw_sq = solver::w_sweep(prob, st, sigma, cfg.pen);
    double dz_sq = 0.0;
    for (int i = 0; i < prob.n(); ++i) {
      const double alpha = prob.y(i) - st.r(i) - st.psi(i) / sigma - shift;
      const double znew = smoothing::prox_abs(alpha, rho);
      const double delta = znew - st.z(i);
      st.z(i) = znew;
      dz_sq += delta * delta;
    }
    const double dpsi_sq = solver::dual_update(prob, st, sigma);
    st.k = k + 1;

    const bool stop = solver::stopping_check(prob, prev, st, stop_cfg);
    if ((st.k - 1) % cfg.trace_stride == 0 || stop || st.k == cfg.max_iters) {
      if (st.k != last_recorded) record(dw_sq, dz_sq, dpsi_sq);
    }
    if (stop) {
      result.termination = solver::Termination::Converged;
      break;
    }
    if (st.k % kResidualRefreshPeriod == 0) st.r = prob.X * st.w;
  }

  result.w = st.w;
  result.z = st.z;
  result.psi = st.psi;
  result.iterations = st.k;
  return result;
}

solver::SolveResult subgradient_solve(const ProblemInstance& prob,
                                      const BaselineConfig& cfg,
                                      const solver::Truth* truth) {
  if (cfg.variant != Variant::Subgradient) {
    throw std::invalid_argument("subgradient_solve: config variant mismatch");
  }
  cfg.validate();

  const double n = static_cast<double>(prob.n());
  const double tau = prob.tau;

  solver::SolveResult result;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(prob.P());
  Eigen::VectorXd grad(prob.P());
  long completed = 0;
  long last_recorded = -1;

  auto record = [&](long k, double dw_sq) {
    solver::IterationRecord rec;
    rec.k = k;
    rec.sigma = kNaN;
    rec.mu = kNaN;
    rec.objective = diag::objective(prob, cfg.pen, w);
    rec.smoothed_lagrangian = kNaN;
    rec.exact_lagrangian = kNaN;
    rec.primal_res = kNaN;
    rec.dw_sq = dw_sq;
    rec.dz_sq = kNaN;
    rec.dpsi_sq = kNaN;
    rec.lemma7_slack = kNaN;
    rec.subgrad_bound = kNaN;
    rec.mse = truth ? (w - truth->w_true).squaredNorm() : kNaN;
    rec.accuracy =
        truth ? datagen::support_accuracy(w, truth->active_set, cfg.support_threshold)
              : kNaN;
    result.trace.push_back(rec);
    last_recorded = k;
  };

  for (long k = 0; k < cfg.max_iters; ++k) {
    const Eigen::VectorXd u = prob.y - prob.X * w;
    Eigen::VectorXd s(prob.n());
    for (int i = 0; i < prob.n(); ++i) {
      if (u(i) > 0.0) {
        s(i) = tau;
      } else if (u(i) < 0.0) {
        s(i) = tau - 1.0;
      } else {
        s(i) = tau - 0.5;
      }
    }
    grad = -(prob.X.transpose() * s) / n;
    for (int p = 0; p < prob.P(); ++p) {
      if (w(p) != 0.0) {
        grad(p) += penalty::subgradient_interval(w(p), cfg.pen).lo;
      }
      // at the penalty kink the chosen subgradient is 0
    }
    const double step = cfg.step0 / std::sqrt(static_cast<double>(k + 1));
    w -= step * grad;
    completed = k + 1;
    const double dw_sq = step * step * grad.squaredNorm();
    if ((completed - 1) % cfg.trace_stride == 0 || completed == cfg.max_iters) {
      if (completed != last_recorded) record(completed, dw_sq);
    }
  }

  result.w = w;
  result.termination = solver::Termination::MaxIters;
  result.iterations = completed;
  return result;
}

}  // namespace sqreg::baselines
