#pragma once

#include <Eigen/Core>

namespace sqreg {

// Regression data for min_w (1/n) sum_i check_loss(y_i - x_i'w, tau) + penalty(w).
// Built through make() so the column norms and range stats are always cached
// and the data is validated once.
struct ProblemInstance {
  Eigen::MatrixXd X;  // n x P, column-major
  Eigen::VectorXd y;  // n
  double tau = 0.5;   // (0,1)

  Eigen::VectorXd col_sqnorms;  // ||X_:,p||_2^2, all > 0
  double min_col_sqnorm = 0.0;
  double max_col_sqnorm = 0.0;
  double max_col_norm = 0.0;

  int n() const { return static_cast<int>(X.rows()); }
  int P() const { return static_cast<int>(X.cols()); }

  // Validates finiteness, dimensions, tau range and nonzero columns;
  // throws std::invalid_argument otherwise.
  static ProblemInstance make(Eigen::MatrixXd X, Eigen::VectorXd y, double tau);
};

}  // namespace sqreg
