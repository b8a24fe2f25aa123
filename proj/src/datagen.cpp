#include "sqreg/datagen.hpp"

#include <cmath>
#include <stdexcept>

namespace sqreg::datagen {

double normal_cdf(double x) {
  // Phi(x) = erfc(-x/sqrt(2))/2; erfc keeps full relative accuracy in the
  // left tail where 1 - erf would cancel.
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
  }
  double lo = -10.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

void ScenarioConfig::validate() const {
  if (n < 1 || P < 1) throw std::invalid_argument("scenario: n and P must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("scenario: tau must lie in (0,1)");
  if (!std::isfinite(noise_scale) || noise_scale < 0.0) {
    throw std::invalid_argument("scenario: noise_scale must be finite and >= 0");
  }
  if (!std::isfinite(xi_sd) || xi_sd < 0.0) {
    throw std::invalid_argument("scenario: xi_sd must be finite and >= 0");
  }
  if (scenario == Scenario::FixedSupport) {
    if (P < 20) throw std::invalid_argument("fixed_support scenario needs P >= 20");
  } else {
    if (s < 1 || s > P - 1) {
      throw std::invalid_argument("variable_support scenario needs 1 <= s <= P-1");
    }
  }
}

Eigen::MatrixXd sample_design(int n, int P, Rng& rng) {
  Eigen::MatrixXd X(n, P);
  const double carry = 0.5;
  const double fresh = std::sqrt(0.75);
  for (int i = 0; i < n; ++i) {
    double latent = rng.next_normal();
    X(i, 0) = normal_cdf(latent);
    for (int p = 1; p < P; ++p) {
      latent = carry * latent + fresh * rng.next_normal();
      X(i, p) = latent;
    }
  }
  return X;
}

GeneratedTrial gen_trial(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  GeneratedTrial trial;
  trial.X = sample_design(cfg.n, cfg.P, rng);

  Eigen::VectorXd xi(cfg.P);
  for (int p = 0; p < cfg.P; ++p) xi(p) = cfg.xi_sd * rng.next_normal();

  Eigen::VectorXd eps(cfg.n);
  for (int i = 0; i < cfg.n; ++i) eps(i) = rng.next_normal();

  std::vector<int> unit_coords;  // active coordinates beyond the first
  if (cfg.scenario == Scenario::FixedSupport) {
    unit_coords = {5, 11, 14, 19};
  } else {
    unit_coords.reserve(static_cast<std::size_t>(cfg.s));
    for (int j = 1; j <= cfg.s; ++j) unit_coords.push_back(j);
  }

  trial.y = trial.X * xi;
  for (int j : unit_coords) trial.y += trial.X.col(j);
  trial.y += cfg.noise_scale * eps.cwiseProduct(trial.X.col(0));

  trial.w_true = xi;
  for (int j : unit_coords) trial.w_true(j) += 1.0;
  trial.w_true(0) += cfg.noise_scale * normal_quantile(cfg.tau);

  trial.active_set.push_back(0);
  trial.active_set.insert(trial.active_set.end(), unit_coords.begin(), unit_coords.end());
  return trial;
}

double mse(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true) {
  if (w_hat.size() != w_true.size()) {
    throw std::invalid_argument("mse: length mismatch");
  }
  return (w_hat - w_true).squaredNorm();
}

double support_accuracy(const Eigen::VectorXd& w_hat, const std::vector<int>& active_set,
                        double threshold) {
  if (threshold <= 0.0) throw std::invalid_argument("support_accuracy: threshold must be > 0");
  const auto P = w_hat.size();
  std::vector<char> active(static_cast<std::size_t>(P), 0);
  for (int j : active_set) {
    if (j < 0 || j >= P) throw std::invalid_argument("support_accuracy: active index out of range");
    active[static_cast<std::size_t>(j)] = 1;
  }
  long correct = 0;
  for (Eigen::Index p = 0; p < P; ++p) {
    const bool detected = std::abs(w_hat(p)) > threshold;
    if (detected == static_cast<bool>(active[static_cast<std::size_t>(p)])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(P);
}

}  // namespace sqreg::datagen
