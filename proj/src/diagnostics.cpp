#include "sqreg/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqreg/smoothing.hpp"

namespace sqreg::diag {

namespace {

double penalty_sum(const penalty::Params& pen, const Eigen::VectorXd& w) {
  double s = 0.0;
  for (Eigen::Index p = 0; p < w.size(); ++p) s += penalty::eval(w(p), pen);
  return s;
}

// psi'(z+Xw-y) + (sigma/2)||z+Xw-y||^2 + n*penalty_sum, the part shared by
// both Lagrangians.
double lagrangian_tail(const ProblemInstance& prob, const penalty::Params& pen,
                       const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                       const Eigen::VectorXd& psi, double sigma,
                       const Eigen::VectorXd* Xw) {
  Eigen::VectorXd res = Xw ? (z + *Xw - prob.y).eval() : (z + prob.X * w - prob.y).eval();
  return psi.dot(res) + 0.5 * sigma * res.squaredNorm() +
         static_cast<double>(prob.n()) * penalty_sum(pen, w);
}

}  // namespace

double objective(const ProblemInstance& prob, const penalty::Params& pen,
                 const Eigen::VectorXd& w, const Eigen::VectorXd* Xw) {
  Eigen::VectorXd u = Xw ? (prob.y - *Xw).eval() : (prob.y - prob.X * w).eval();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) loss += smoothing::check_loss(u(i), prob.tau);
  return loss / static_cast<double>(prob.n()) + penalty_sum(pen, w);
}

double exact_lagrangian(const ProblemInstance& prob, const penalty::Params& pen,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& psi, double sigma,
                        const Eigen::VectorXd* Xw) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += smoothing::check_loss(z(i), prob.tau);
  return loss + lagrangian_tail(prob, pen, w, z, psi, sigma, Xw);
}

double smoothed_lagrangian(const ProblemInstance& prob, const penalty::Params& pen,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& psi, double sigma, double mu,
                           const Eigen::VectorXd* Xw) {
  return smoothing::h_eval(z, mu, prob.tau) +
         lagrangian_tail(prob, pen, w, z, psi, sigma, Xw);
}

KKTResidual kkt_residual(const ProblemInstance& prob, const penalty::Params& pen,
                         const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                         const Eigen::VectorXd& psi) {
  KKTResidual r;
  const double n = static_cast<double>(prob.n());
  r.primal = (z + prob.X * w - prob.y).lpNorm<Eigen::Infinity>();

  const Eigen::VectorXd xtpsi = prob.X.transpose() * psi;
  for (Eigen::Index p = 0; p < w.size(); ++p) {
    penalty::Interval iv = penalty::subgradient_interval(w(p), pen);
    iv.lo *= n;
    iv.hi *= n;
    r.dual_w = std::max(r.dual_w, iv.dist(-xtpsi(p)));
  }

  const double tau = prob.tau;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    penalty::Interval iv;
    if (z(i) > 0.0) {
      iv = {tau, tau};
    } else if (z(i) < 0.0) {
      iv = {tau - 1.0, tau - 1.0};
    } else {
      iv = {tau - 1.0, tau};
    }
    r.dual_z = std::max(r.dual_z, iv.dist(-psi(i)));
  }
  return r;
}

double dual_step_slack(double dpsi_sq, double dz_sq, double mu_prev, double mu_cur,
                       int n) {
  const double ratio = (mu_prev - mu_cur) / mu_cur;
  const double nn = static_cast<double>(n);
  return dz_sq / (2.0 * mu_cur * mu_cur) + 0.5 * nn * nn * ratio * ratio - dpsi_sq;
}

double descent_sigma_threshold(const ProblemInstance& prob, const penalty::Params& pen) {
  return 2.0 * static_cast<double>(prob.n()) * penalty::weak_convexity_modulus(pen) /
         prob.min_col_sqnorm;
}

DescentCheck descent_monitor(const ProblemInstance& prob, const penalty::Params& pen,
                             const solver::State& prev, const solver::State& cur,
                             double prev_dz_sq, double mu_two_back) {
  if (!std::isfinite(prev_dz_sq) || !std::isfinite(mu_two_back)) {
    throw std::invalid_argument("descent_monitor: needs two completed iterations of history");
  }
  DescentCheck out;
  const double n = static_cast<double>(prob.n());
  out.xi = cur.sigma * prob.min_col_sqnorm / (2.0 * n) -
           penalty::weak_convexity_modulus(pen);
  if (!(cur.sigma > descent_sigma_threshold(prob, pen))) return out;
  out.applicable = true;

  out.lhs = smoothed_lagrangian(prob, pen, cur.w, cur.z, cur.psi, cur.sigma, cur.mu) -
            smoothed_lagrangian(prob, pen, prev.w, prev.z, prev.psi, prev.sigma, prev.mu);

  const double beta = cur.sigma * cur.mu;
  const double dw_sq = (cur.w - prev.w).squaredNorm();
  const double dz_sq = (cur.z - prev.z).squaredNorm();
  const double mu_ratio = (prev.mu - cur.mu) / cur.mu;
  const double mu_ratio_back = (mu_two_back - prev.mu) / prev.mu;
  out.rhs = -out.xi * dw_sq +
            0.5 * cur.sigma * (1.0 / (beta * beta) - 1.0) * dz_sq +
            (cur.sigma - prev.sigma) / (2.0 * beta * beta) * prev_dz_sq +
            n * n / (2.0 * cur.sigma) * mu_ratio * mu_ratio +
            n * n * (cur.sigma - prev.sigma) / (2.0 * prev.sigma * prev.sigma) *
                mu_ratio_back * mu_ratio_back;
  return out;
}

double stationarity_gap_bound(double dw_norm, double dz_norm, double sigma_prev,
                              double sigma_cur, double mu_cur, int n, double v) {
  const double beta = sigma_cur * mu_cur;
  const double half_inv_beta = 1.0 / (2.0 * beta);
  const double z_coef =
      half_inv_beta + sigma_cur * half_inv_beta + v * (sigma_cur * half_inv_beta + 1.0);
  const double drift = (v + 1.0 + 1.0 / sigma_cur) * (sigma_cur - sigma_prev) *
                       static_cast<double>(n) / (2.0 * sigma_cur);
  return sigma_cur * v * v * dw_norm + z_coef * dz_norm + drift;
}

double stationarity_gap_bound(const ProblemInstance& prob, const solver::State& prev,
                              const solver::State& cur) {
  const double v = static_cast<double>(prob.P()) * prob.max_col_norm;
  return stationarity_gap_bound((cur.w - prev.w).norm(), (cur.z - prev.z).norm(),
                                prev.sigma, cur.sigma, cur.mu, prob.n(), v);
}

RateFit rate_fit_points(const std::vector<std::pair<double, double>>& k_value,
                        long k_lo, long k_hi) {
  if (k_lo >= k_hi) throw std::invalid_argument("rate_fit: window must satisfy k_lo < k_hi");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  long m = 0;
  for (const auto& [k, value] : k_value) {
    if (!(k >= static_cast<double>(k_lo) && k <= static_cast<double>(k_hi))) continue;
    if (!(value > 0.0) || !std::isfinite(value)) continue;
    const double x = std::log(k);
    const double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++m;
  }
  if (m < 10) throw std::invalid_argument("rate_fit: fewer than 10 positive samples in window");
  const double dm = static_cast<double>(m);
  const double vxx = sxx - sx * sx / dm;
  const double vxy = sxy - sx * sy / dm;
  const double vyy = syy - sy * sy / dm;
  RateFit fit;
  fit.k_lo = k_lo;
  fit.k_hi = k_hi;
  fit.samples = m;
  fit.slope = vxy / vxx;
  fit.intercept = (sy - fit.slope * sx) / dm;
  fit.r2 = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

RateFit rate_fit(const std::vector<solver::IterationRecord>& trace,
                 const std::function<double(const solver::IterationRecord&)>& quantity,
                 long k_lo, long k_hi) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(trace.size());
  for (const auto& rec : trace) {
    pts.emplace_back(static_cast<double>(rec.k), quantity(rec));
  }
  return rate_fit_points(pts, k_lo, k_hi);
}

}  // namespace sqreg::diag
