#include "sqreg/penalty.hpp"

#include <stdexcept>

namespace sqreg::penalty {

void Params::validate() const {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw std::invalid_argument("penalty: lambda must be finite and > 0");
  double gmin = kind == Kind::MCP ? 1.0 : 2.0;
  if (!std::isfinite(gamma) || gamma < gmin)
    throw std::invalid_argument("penalty: gamma below the valid range for this kind");
}

double weak_convexity_modulus(const Params& p) {
  return p.kind == Kind::MCP ? 1.0 / p.gamma : 1.0 / (p.gamma - 1.0);
}

double eval(double w, const Params& p) {
  double aw = std::fabs(w);
  double l = p.lambda, g = p.gamma;
  if (p.kind == Kind::MCP) {
    if (aw <= g * l) return l * aw - w * w / (2.0 * g);
    return 0.5 * g * l * l;
  }
  if (aw <= l) return l * aw;
  if (aw <= g * l) return -(aw * aw - 2.0 * g * l * aw + l * l) / (2.0 * (g - 1.0));
  return 0.5 * (g + 1.0) * l * l;
}

Interval subgradient_interval(double w, const Params& p) {
  double l = p.lambda, g = p.gamma;
  if (w == 0.0) return {-l, l};
  double s = w > 0.0 ? 1.0 : -1.0;
  double aw = std::fabs(w);
  double d;
  if (p.kind == Kind::MCP) {
    d = aw <= g * l ? l - aw / g : 0.0;
  } else {
    if (aw <= l)
      d = l;
    else if (aw <= g * l)
      d = (g * l - aw) / (g - 1.0);
    else
      d = 0.0;
  }
  d *= s;
  return {d, d};
}

double shrink(double a, double k) {
  if (a > k) return a - k;
  if (a < -k) return a + k;
  return 0.0;
}

double prox_objective(double x, double a, const Params& p, double t) {
  double d = x - a;
  return eval(x, p) + d * d / (2.0 * t);
}

namespace {

// Pick the better of two candidate minimizers; exact value ties break toward
// the smaller magnitude so the result is unique and deterministic.
void consider(double x, double a, const Params& p, double t, double& best, double& bestv) {
  double v = prox_objective(x, a, p, t);
  if (v < bestv || (v == bestv && std::fabs(x) < std::fabs(best))) {
    best = x;
    bestv = v;
  }
}

}  // namespace

double prox(double a, const Params& p, double t) {
  double l = p.lambda, g = p.gamma;
  double s = a < 0.0 ? -1.0 : 1.0;
  double aa = std::fabs(a);
  double gl = g * l;

  if (p.kind == Kind::MCP) {
    if (t < g) {
      if (aa > gl) return a;
      return s * (shrink(aa, t * l) / (1.0 - t / g));
    }
  } else {
    if (t < g - 1.0) {
      if (aa > gl) return a;
      if (aa <= (1.0 + t) * l) return s * shrink(aa, t * l);
      return s * (shrink(aa, t * g * l / (g - 1.0)) / (1.0 - t / (g - 1.0)));
    }
  }

  // Large-step fallback: the quadratic no longer dominates the concave part,
  // so compare every branch minimizer. Minimizers lie on the same side as a
  // (or at 0); each quadratic branch contributes its clamped stationary point
  // when it is convex and its endpoints otherwise.
  double best = 0.0;
  double bestv = prox_objective(0.0, a, p, t);
  consider(a, a, p, t, best, bestv);
  consider(s * gl, a, p, t, best, bestv);
  if (p.kind == Kind::MCP) {
    double denom = 1.0 - t / g;
    if (denom > 0.0)
      consider(s * std::clamp(shrink(aa, t * l) / denom, 0.0, gl), a, p, t, best, bestv);
  } else {
    consider(s * l, a, p, t, best, bestv);
    consider(s * std::clamp(shrink(aa, t * l), 0.0, l), a, p, t, best, bestv);
    double denom = 1.0 - t / (g - 1.0);
    if (denom > 0.0)
      consider(s * std::clamp(shrink(aa, t * g * l / (g - 1.0)) / denom, l, gl), a, p, t,
               best, bestv);
  }
  return best;
}

}  // namespace sqreg::penalty
