#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "sqreg/penalty.hpp"
#include "sqreg/rng.hpp"

using sqreg::penalty::Kind;
using sqreg::penalty::Params;

namespace {

Params mcp(double lambda = 0.055, double gamma = 2.1) {
  Params p;
  p.kind = Kind::MCP;
  p.lambda = lambda;
  p.gamma = gamma;
  return p;
}

Params scad(double lambda = 0.055, double gamma = 3.1) {
  Params p;
  p.kind = Kind::SCAD;
  p.lambda = lambda;
  p.gamma = gamma;
  return p;
}

}  // namespace

TEST_CASE("penalty evaluation matches hand-computed branch values") {
  const Params m = mcp();
  CHECK(sqreg::penalty::eval(0.0, m) == 0.0);
  // Past the plateau boundary gamma*lambda = 0.1155 the penalty saturates.
  CHECK(sqreg::penalty::eval(1.0, m) == doctest::Approx(0.00317625).epsilon(1e-12));
  CHECK(sqreg::penalty::eval(-1.0, m) == doctest::Approx(0.00317625).epsilon(1e-12));

  const Params s = scad();
  // Middle branch: lambda < 0.1 <= gamma*lambda.
  const double expect = -(0.01 - 2.0 * 3.1 * 0.055 * 0.1 + 0.055 * 0.055) / (2.0 * (3.1 - 1.0));
  CHECK(sqreg::penalty::eval(0.1, s) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(0.0050178571428571).epsilon(1e-10));
}

TEST_CASE("penalty evaluation is even, nonnegative, monotone, saturating") {
  sqreg::Rng rng(2024);
  for (int rep = 0; rep < 500; ++rep) {
    const Params p = rng.next_unit() < 0.5 ? mcp(rng.next_uniform(0.01, 1.0), rng.next_uniform(1.0, 5.0))
                                           : scad(rng.next_uniform(0.01, 1.0), rng.next_uniform(2.0, 5.0));
    const double w = rng.next_uniform(-3.0, 3.0);
    const double v = sqreg::penalty::eval(w, p);
    CHECK(v >= 0.0);
    CHECK(sqreg::penalty::eval(-w, p) == doctest::Approx(v).epsilon(1e-14));
    // Non-decreasing in |w|.
    const double w2 = w * rng.next_uniform(1.0, 2.0);
    CHECK(sqreg::penalty::eval(w2, p) >= v - 1e-14);
    // Constant past gamma*lambda.
    const double plateau = sqreg::penalty::eval(p.gamma * p.lambda + 0.5, p);
    CHECK(sqreg::penalty::eval(p.gamma * p.lambda + 2.0, p) ==
          doctest::Approx(plateau).epsilon(1e-14));
    const double cap = p.kind == Kind::MCP ? p.gamma * p.lambda * p.lambda / 2.0
                                           : (p.gamma + 1.0) * p.lambda * p.lambda / 2.0;
    CHECK(plateau == doctest::Approx(cap).epsilon(1e-12));
  }
}

TEST_CASE("weak convexity modulus and midpoint convexity of eval + (rho/2)w^2") {
  CHECK(sqreg::penalty::weak_convexity_modulus(mcp()) == doctest::Approx(1.0 / 2.1));
  CHECK(sqreg::penalty::weak_convexity_modulus(scad()) == doctest::Approx(1.0 / 2.1));
  CHECK(sqreg::penalty::weak_convexity_modulus(scad(0.055, 3.5)) == doctest::Approx(1.0 / 2.5));

  sqreg::Rng rng(77);
  for (int rep = 0; rep < 1000; ++rep) {
    const Params p = rng.next_unit() < 0.5 ? mcp(rng.next_uniform(0.01, 1.0), rng.next_uniform(1.0, 4.0))
                                           : scad(rng.next_uniform(0.01, 1.0), rng.next_uniform(2.0, 4.0));
    const double rho = sqreg::penalty::weak_convexity_modulus(p);
    const auto conv = [&](double x) {
      return sqreg::penalty::eval(x, p) + 0.5 * rho * x * x;
    };
    const double a = rng.next_uniform(-2.0, 2.0), b = rng.next_uniform(-2.0, 2.0);
    const double mid = conv(0.5 * (a + b));
    CHECK(mid <= 0.5 * (conv(a) + conv(b)) + 1e-10);
  }
}

TEST_CASE("subgradient intervals match branch formulas") {
  const Params m = mcp();
  const auto at0 = sqreg::penalty::subgradient_interval(0.0, m);
  CHECK(at0.lo == doctest::Approx(-0.055));
  CHECK(at0.hi == doctest::Approx(0.055));

  const auto flat = sqreg::penalty::subgradient_interval(1.0, m);
  CHECK(flat.lo == 0.0);
  CHECK(flat.hi == 0.0);

  const auto mid = sqreg::penalty::subgradient_interval(0.05, m);
  CHECK(mid.lo == doctest::Approx(0.055 - 0.05 / 2.1).epsilon(1e-12));
  CHECK(mid.hi == doctest::Approx(mid.lo).epsilon(1e-14));
  CHECK(mid.lo == doctest::Approx(0.0311904761904762).epsilon(1e-10));
}

TEST_CASE("subgradient agrees with central differences off the kinks") {
  sqreg::Rng rng(91);
  int tested = 0;
  while (tested < 1000) {
    const Params p = rng.next_unit() < 0.5 ? mcp(rng.next_uniform(0.05, 1.0), rng.next_uniform(1.2, 4.0))
                                           : scad(rng.next_uniform(0.05, 1.0), rng.next_uniform(2.2, 4.0));
    const double w = rng.next_uniform(-2.0, 2.0);
    // Skip near the kinks/branch joints where central differences straddle a corner.
    const double aw = std::abs(w);
    const double gl = p.gamma * p.lambda;
    const bool near_joint = aw < 1e-3 || std::abs(aw - gl) < 1e-3 ||
                            (p.kind == Kind::SCAD && std::abs(aw - p.lambda) < 1e-3);
    if (near_joint) continue;
    ++tested;
    const auto iv = sqreg::penalty::subgradient_interval(w, p);
    CHECK(iv.hi - iv.lo <= 1e-14);  // singleton off the kink
    const double fd = oracles::numeric_grad(
        [&](double x) { return sqreg::penalty::eval(x, p); }, w);
    CHECK(iv.lo == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("interval distance helper") {
  sqreg::penalty::Interval iv{-1.0, 2.0};
  CHECK(iv.dist(0.5) == 0.0);
  CHECK(iv.dist(-1.0) == 0.0);
  CHECK(iv.dist(-3.0) == doctest::Approx(2.0));
  CHECK(iv.dist(5.0) == doctest::Approx(3.0));
}

TEST_CASE("shrink operator") {
  CHECK(sqreg::penalty::shrink(1.0, 0.3) == doctest::Approx(0.7));
  CHECK(sqreg::penalty::shrink(0.2, 0.3) == 0.0);
  CHECK(sqreg::penalty::shrink(-1.0, 0.3) == doctest::Approx(-0.7));
}

TEST_CASE("prox closed forms on hand examples") {
  const Params m = mcp();
  CHECK(sqreg::penalty::prox(0.0, m, 0.5) == 0.0);
  // |a| > gamma*lambda: the quadratic dominates, x = a.
  CHECK(sqreg::penalty::prox(1.0, m, 0.1) == doctest::Approx(1.0).epsilon(1e-12));
  // Interior branch: Shrink(0.08, 0.5*0.055)/(1 - 0.5/2.1).
  const double expect = sqreg::penalty::shrink(0.08, 0.0275) / (1.0 - 0.5 / 2.1);
  CHECK(sqreg::penalty::prox(0.08, m, 0.5) == doctest::Approx(expect).epsilon(1e-10));
  const auto oracle = oracles::brute_min_1d(
      [&](double x) { return sqreg::penalty::prox_objective(x, 0.08, m, 0.5); }, -0.2, 0.2);
  CHECK(sqreg::penalty::prox_objective(sqreg::penalty::prox(0.08, m, 0.5), 0.08, m, 0.5) ==
        doctest::Approx(oracle.second).epsilon(1e-8));
}

TEST_CASE("prox keeps sign and is dominated by |a|") {
  sqreg::Rng rng(13);
  for (int rep = 0; rep < 2000; ++rep) {
    const bool use_mcp = rng.next_unit() < 0.5;
    const Params p = use_mcp ? mcp(rng.next_uniform(0.01, 1.0), rng.next_uniform(1.0, 4.0))
                             : scad(rng.next_uniform(0.01, 1.0), rng.next_uniform(2.0, 4.0));
    const double a = rng.next_uniform(-3.0, 3.0);
    const double t = rng.next_uniform(1e-3, 2.0 * p.gamma);
    const double x = sqreg::penalty::prox(a, p, t);
    CHECK(std::abs(x) <= std::abs(a) + 1e-12);
    CHECK(x * a >= -1e-12);
  }
}

TEST_CASE("prox objective matches the brute-force oracle, fallback region included") {
  sqreg::Rng rng(4242);
  for (int rep = 0; rep < 2000; ++rep) {
    const bool use_mcp = rng.next_unit() < 0.5;
    const double lambda = rng.next_uniform(0.01, 1.0);
    const double gamma = use_mcp ? rng.next_uniform(1.0, 4.0) : rng.next_uniform(2.0, 4.0);
    const Params p = use_mcp ? mcp(lambda, gamma) : scad(lambda, gamma);
    const double a = rng.next_uniform(-3.0, 3.0);
    // Half the draws land beyond the closed-form validity region to force the
    // candidate-enumeration path.
    const double t = rng.next_uniform(1e-3, 2.0 * gamma);
    const double x = sqreg::penalty::prox(a, p, t);
    const double obj = sqreg::penalty::prox_objective(x, a, p, t);
    const double half = std::abs(a) + gamma * lambda + 1.0;
    const auto oracle = oracles::brute_min_1d(
        [&](double v) { return sqreg::penalty::prox_objective(v, a, p, t); }, -half, half);
    CHECK(obj <= oracle.second + 1e-8 * (1.0 + std::abs(oracle.second)));
  }
}

TEST_CASE("parameter validation rejects bad penalties") {
  Params p = mcp();
  CHECK_NOTHROW(p.validate());
  p.lambda = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = mcp(0.055, 0.9);  // MCP requires gamma >= 1
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = scad(0.055, 1.9);  // SCAD requires gamma >= 2
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = scad();
  CHECK_NOTHROW(p.validate());
}
