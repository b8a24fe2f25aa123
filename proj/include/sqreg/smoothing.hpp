#pragma once

#include <Eigen/Core>

namespace sqreg::smoothing {

// Pinball/check loss: u * (tau - 1[u < 0]). Equals (|u| + (2*tau-1)*u)/2.
double check_loss(double u, double tau);

// Huber-style even smoothing of |z| with width mu > 0:
// |z| when |z| >= mu, z^2/(2*mu) + mu/2 otherwise.
// Upper bound with gap in [0, mu/2]; nondecreasing in mu.
double smoothed_abs(double z, double mu);

// d/dz of smoothed_abs: sign(z) outside the quadratic cap, z/mu inside.
// 1/mu-Lipschitz in z.
double smoothed_abs_grad(double z, double mu);

// Componentwise smoothed check-loss aggregate over a vector:
//   (sum_i smoothed_abs(z_i, mu) + (2*tau-1) * sum_i z_i) / 2.
// Sandwiches sum_i check_loss(z_i) from above within n*mu/4.
double h_eval(const Eigen::VectorXd& z, double mu, double tau);

// Gradient component: smoothed_abs_grad(z,mu)/2 + (tau - 1/2), in [tau-1, tau].
double h_grad_component(double z, double mu, double tau);
Eigen::VectorXd h_grad(const Eigen::VectorXd& z, double mu, double tau);

// argmin_v |v|*rho + (v-x)^2/2  == shrink(x, rho); the mu -> 0 limit below.
double prox_abs(double x, double rho);

// argmin_v smoothed_abs(v, mu) + (v-x)^2/(2*rho) for rho > 0, mu > 0:
//   x - rho        when x >= rho + mu,
//   x / (1+rho/mu) when |x| < rho + mu,
//   x + rho        when x <= -(rho + mu).
double prox_smoothed_abs(double x, double rho, double mu);

}  // namespace sqreg::smoothing
