#include "sqreg/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace sqreg {

ProblemInstance ProblemInstance::make(Eigen::MatrixXd X, Eigen::VectorXd y, double tau) {
  if (X.rows() == 0 || X.cols() == 0)
    throw std::invalid_argument("problem: empty design matrix");
  if (y.size() != X.rows())
    throw std::invalid_argument("problem: y length does not match rows of X");
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("problem: tau must lie in (0,1)");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("problem: non-finite entries in data");

  ProblemInstance prob;
  prob.X = std::move(X);
  prob.y = std::move(y);
  prob.tau = tau;
  prob.col_sqnorms = prob.X.colwise().squaredNorm();
  prob.min_col_sqnorm = prob.col_sqnorms.minCoeff();
  prob.max_col_sqnorm = prob.col_sqnorms.maxCoeff();
  prob.max_col_norm = std::sqrt(prob.max_col_sqnorm);
  if (prob.min_col_sqnorm <= 0.0)
    throw std::invalid_argument("problem: design matrix has a zero column");
  return prob;
}

}  // namespace sqreg
