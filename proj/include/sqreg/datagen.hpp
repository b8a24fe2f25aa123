#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "sqreg/rng.hpp"

namespace sqreg::datagen {

// Standard normal CDF, absolute error well under 1e-7 (erfc-backed).
double normal_cdf(double x);

// Inverse CDF by bisection of normal_cdf over [-10, 10] to |Phi(q)-p| <= 1e-10.
// Throws std::invalid_argument for p outside (0,1).
double normal_quantile(double p);

enum class Scenario {
  FixedSupport,    // AR(1) design, active set {0,5,11,14,19} (0-based)
  VariableSupport  // AR(1) design, active set {0,1,...,s}
};

struct ScenarioConfig {
  Scenario scenario = Scenario::FixedSupport;
  int n = 100;
  int P = 300;
  double tau = 0.7;
  int s = 5;                 // VariableSupport: active coordinates beyond the first
  double noise_scale = 0.7;  // multiplies eps .* x_1
  double xi_sd = 1e-3;       // sd of the dense background coefficients
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct GeneratedTrial {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd w_true;
  std::vector<int> active_set;  // 0-based, ascending
};

// Row-wise AR(1) latent design with corr(p,q) = 0.5^|p-q|:
//   latent_0 = e_0, latent_p = 0.5*latent_{p-1} + sqrt(0.75)*e_p,
// then column 0 is mapped through the normal CDF (so it is positive and the
// conditional quantile of the multiplicative noise term is identified).
Eigen::MatrixXd sample_design(int n, int P, Rng& rng);

// Draw order per trial: design (row by row), background coefficients xi,
// noise eps. Response:
//   y = X*xi + sum_{j in A'} X_j + noise_scale * (eps .* X_0)
// with A' the active set beyond coordinate 0; the reported truth is
//   w_true = xi + 1_{A'} + noise_scale*normal_quantile(tau)*e_0,
// the conditional tau-quantile coefficient vector.
GeneratedTrial gen_trial(const ScenarioConfig& cfg);

// Squared L2 distance between estimate and truth.
double mse(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true);

// (#active coords with |w|>threshold + #inactive coords with |w|<=threshold)/P.
double support_accuracy(const Eigen::VectorXd& w_hat, const std::vector<int>& active_set,
                        double threshold = 1e-2);

}  // namespace sqreg::datagen
