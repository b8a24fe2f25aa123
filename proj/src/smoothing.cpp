#include "sqreg/smoothing.hpp"

#include <cmath>

namespace sqreg::smoothing {

double check_loss(double u, double tau) { return u * (tau - (u < 0.0 ? 1.0 : 0.0)); }

double smoothed_abs(double z, double mu) {
  double az = std::fabs(z);
  if (az >= mu) return az;
  return z * z / (2.0 * mu) + 0.5 * mu;
}

double smoothed_abs_grad(double z, double mu) {
  if (z >= mu) return 1.0;
  if (z <= -mu) return -1.0;
  return z / mu;
}

double h_eval(const Eigen::VectorXd& z, double mu, double tau) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) acc += smoothed_abs(z[i], mu);
  return 0.5 * (acc + (2.0 * tau - 1.0) * z.sum());
}

double h_grad_component(double z, double mu, double tau) {
  // (tau - 0.5) rather than (2*tau-1)/2 keeps the arithmetic identical to the
  // dual update path, so the stationarity identity holds to rounding error.
  return 0.5 * smoothed_abs_grad(z, mu) + (tau - 0.5);
}

Eigen::VectorXd h_grad(const Eigen::VectorXd& z, double mu, double tau) {
  Eigen::VectorXd g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) g[i] = h_grad_component(z[i], mu, tau);
  return g;
}

double prox_abs(double x, double rho) {
  if (x > rho) return x - rho;
  if (x < -rho) return x + rho;
  return 0.0;
}

double prox_smoothed_abs(double x, double rho, double mu) {
  double edge = rho + mu;
  if (x >= edge) return x - rho;
  if (x <= -edge) return x + rho;
  return x / (1.0 + rho / mu);
}

}  // namespace sqreg::smoothing
