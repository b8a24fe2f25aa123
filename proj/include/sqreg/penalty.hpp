#pragma once

#include <algorithm>
#include <cmath>

namespace sqreg::penalty {

enum class Kind { MCP, SCAD };

struct Params {
  Kind kind = Kind::MCP;
  double lambda = 0.055;  // > 0
  double gamma = 2.1;     // MCP: >= 1, SCAD: >= 2

  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

// Largest rho such that g(w) + (rho/2) w^2 is convex:
// 1/gamma for MCP, 1/(gamma-1) for SCAD.
double weak_convexity_modulus(const Params& p);

// Scalar penalty g(w). Even, nonnegative, nondecreasing in |w|, constant
// (gamma*lambda^2/2 resp. (gamma+1)*lambda^2/2) for |w| > gamma*lambda.
double eval(double w, const Params& p);

// Closed interval of the (Clarke) subdifferential of g at w; a singleton
// away from the origin since both penalties are C^1 there.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double dist(double x) const { return std::max({lo - x, x - hi, 0.0}); }
};
Interval subgradient_interval(double w, const Params& p);

// Soft threshold: argmin_x |x|*k + (x-a)^2/2 for k >= 0.
double shrink(double a, double k);

// g(x) + (x-a)^2 / (2t), the scalar prox objective.
double prox_objective(double x, double a, const Params& p, double t);

// Global minimizer of prox_objective over x, exact for every t > 0.
// Inside the strong-convexity region (t < gamma for MCP, t < gamma-1 for
// SCAD) the standard closed forms apply; beyond it the subproblem can have
// several local minima, so the finitely many branch candidates are compared
// directly and ties go to the smaller |x|.
double prox(double a, const Params& p, double t);

}  // namespace sqreg::penalty
