#include <Eigen/Core>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sqreg/diagnostics.hpp"
#include "sqreg/problem.hpp"
#include "sqreg/rng.hpp"
#include "sqreg/smoothing.hpp"
#include "sqreg/solver.hpp"

using sqreg::ProblemInstance;
namespace sol = sqreg::solver;

namespace {

sol::Config base_config() {
  sol::Config cfg;
  cfg.pen.kind = sqreg::penalty::Kind::MCP;
  cfg.pen.lambda = 0.055;
  cfg.pen.gamma = 2.1;
  return cfg;
}

ProblemInstance random_problem(int n, int P, std::uint64_t seed, double tau = 0.7) {
  sqreg::Rng rng(seed);
  Eigen::MatrixXd X(n, P);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < P; ++p) X(i, p) = rng.next_normal();
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.next_normal();
  return ProblemInstance::make(X, y, tau);
}

}  // namespace

TEST_CASE("penalty-parameter schedule values") {
  sol::Config cfg = base_config();
  cfg.c = 0.5;
  cfg.sigma0 = 0.5;
  CHECK(sol::sigma_schedule(0, cfg) == doctest::Approx(0.5));
  cfg.sigma0 = 0.3;
  CHECK(sol::sigma_schedule(0, cfg) == doctest::Approx(0.5));  // max(sigma0, c*sqrt(1))
  cfg.sigma0 = 1.0;
  CHECK(sol::sigma_schedule(3, cfg) == doctest::Approx(1.0));  // 0.5*sqrt(4)
  cfg.burn_in = 10;
  CHECK(sol::sigma_schedule(5, cfg) == doctest::Approx(1.0));  // frozen at sigma0
  cfg.burn_in = 0;
  double prev = 0.0;
  for (long k = 0; k < 500; ++k) {
    const double s = sol::sigma_schedule(k, cfg);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("smoothing-width schedule is beta/sigma") {
  sol::Config cfg = base_config();
  CHECK(sol::mu_schedule(0.5, cfg) == doctest::Approx(3.4641016151377544));
  CHECK(sol::mu_schedule(std::sqrt(3.0), cfg) == doctest::Approx(1.0));
  double prev_mu = 1e300;
  for (double sigma = 0.5; sigma < 1e6; sigma *= 3.0) {
    const double mu = sol::mu_schedule(sigma, cfg);
    CHECK(mu < prev_mu);
    CHECK(mu * sigma == doctest::Approx(cfg.beta).epsilon(1e-15));
    CHECK(mu == cfg.beta / sigma);  // definitionally exact
    prev_mu = mu;
  }
}

TEST_CASE("config validation") {
  sol::Config cfg = base_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.beta = 1.0;  // below sqrt(3) while the schedule engages
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.burn_in = cfg.max_iters;  // frozen schedule lifts the beta floor
  CHECK_NOTHROW(cfg.validate());
  cfg = base_config();
  cfg.c = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config();
  cfg.eps1 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config();
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config();
  cfg.sigma0 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("coordinate target at a zero-residual point returns the current coordinate") {
  const ProblemInstance prob = random_problem(6, 3, 11);
  sol::Config cfg = base_config();
  sol::State st = sol::init_state(prob, cfg);
  sqreg::Rng rng(3);
  for (int p = 0; p < 3; ++p) st.w(p) = rng.next_uniform(-1.0, 1.0);
  st.r = prob.X * st.w;
  st.z = prob.y - st.r;  // residual-free configuration
  for (int p = 0; p < 3; ++p) {
    CHECK(sol::w_coordinate_target(prob, st, p, 2.0) ==
          doctest::Approx(st.w(p)).epsilon(1e-12));
  }
}

TEST_CASE("coordinate target solves the single-column least-squares center") {
  Eigen::MatrixXd X(3, 1);
  X << 1.0, 0.0, 0.0;
  Eigen::VectorXd y(3);
  y << 1.0, 0.0, 0.0;
  const ProblemInstance prob = ProblemInstance::make(X, y, 0.5);
  sol::Config cfg = base_config();
  sol::State st = sol::init_state(prob, cfg);
  CHECK(sol::w_coordinate_target(prob, st, 0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("coordinate target minimizes the quadratic block of the smoothed objective") {
  const ProblemInstance prob = random_problem(5, 3, 21);
  sol::Config cfg = base_config();
  sol::State st = sol::init_state(prob, cfg);
  sqreg::Rng rng(9);
  for (int p = 0; p < 3; ++p) st.w(p) = rng.next_uniform(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) st.z(i) = rng.next_uniform(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) st.psi(i) = rng.next_uniform(-0.5, 0.5);
  st.r = prob.X * st.w;
  const double sigma = 1.7;
  for (int p = 0; p < 3; ++p) {
    const auto quad = [&](double v) {
      Eigen::VectorXd w = st.w;
      w(p) = v;
      const Eigen::VectorXd res = st.z + prob.X * w - prob.y;
      return st.psi.dot(res) + 0.5 * sigma * res.squaredNorm();
    };
    const double a = sol::w_coordinate_target(prob, st, p, sigma);
    const double ref = oracles::golden_min(quad, a - 5.0, a + 5.0);
    CHECK(a == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("coordinate sweep is a fixed point on all-zero data") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 2, -1, 0.5, 0.3, 1, 2, -1;
  const ProblemInstance prob = ProblemInstance::make(X, Eigen::VectorXd::Zero(4), 0.5);
  sol::Config cfg = base_config();
  sol::State st = sol::init_state(prob, cfg);
  const double dw = sol::w_sweep(prob, st, 1.0, cfg.pen);
  CHECK(dw == 0.0);
  CHECK(st.w.norm() == 0.0);
}

TEST_CASE("coordinate sweep approaches the unpenalized center as the step vanishes") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, 0.0;
  Eigen::VectorXd y(2);
  y << 5.0, 0.0;
  const ProblemInstance prob = ProblemInstance::make(X, y, 0.5);
  sol::Config cfg = base_config();
  sol::State st = sol::init_state(prob, cfg);
  sol::w_sweep(prob, st, 1e9, cfg.pen);  // t_p = n/(sigma) tiny
  CHECK(st.w(0) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(st.r(0) == doctest::Approx(st.w(0)).epsilon(1e-12));
}

TEST_CASE("coordinate sweep matches sequential brute-force block minimization") {
  const ProblemInstance prob = random_problem(10, 4, 33);
  sol::Config cfg = base_config();
  const double sigma = 2.0;

  sol::State st = sol::init_state(prob, cfg);
  sqreg::Rng rng(55);
  for (int i = 0; i < 10; ++i) st.z(i) = rng.next_uniform(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) st.psi(i) = rng.next_uniform(-0.3, 0.3);
  sol::State oracle_st = st;

  sol::w_sweep(prob, st, sigma, cfg.pen);

  // Replay the same sweep, minimizing the full objective block per coordinate.
  const int n = 10;
  Eigen::VectorXd w = oracle_st.w;
  for (int p = 0; p < 4; ++p) {
    const auto block = [&](double v) {
      Eigen::VectorXd wt = w;
      wt(p) = v;
      const Eigen::VectorXd res = oracle_st.z + prob.X * wt - prob.y;
      return oracle_st.psi.dot(res) + 0.5 * sigma * res.squaredNorm() +
             n * sqreg::penalty::eval(v, cfg.pen);
    };
    w(p) = oracles::brute_min_1d(block, -6.0, 6.0).first;
    CHECK(block(st.w(p)) <= block(w(p)) + 1e-8 * (1.0 + std::abs(block(w(p)))));
    CHECK(st.w(p) == doctest::Approx(w(p)).epsilon(1e-5));
    w(p) = st.w(p);  // continue the replay from the solver's trajectory
  }
}

TEST_CASE("z step branch arithmetic") {
  // Zero-residual, symmetric quantile: alpha is exactly zero.
  Eigen::MatrixXd X(2, 1);
  X << 1.0, 1.0;
  Eigen::VectorXd y(2);
  y << 2.0, 2.0;
  const ProblemInstance prob = ProblemInstance::make(X, y, 0.5);
  sol::Config cfg = base_config();
  sol::State st = sol::init_state(prob, cfg);
  st.w(0) = 2.0;
  st.r = prob.X * st.w;
  sol::z_update(prob, st, 1.0, 0.1);
  CHECK(st.z.norm() == 0.0);

  // Single-sample outer branch: alpha = 1 - 0.2 = 0.8, shrink by 1/(2 sigma).
  Eigen::MatrixXd X1(1, 1);
  X1 << 1.0;
  Eigen::VectorXd y1(1);
  y1 << 1.0;
  const ProblemInstance p1 = ProblemInstance::make(X1, y1, 0.7);
  sol::State s1 = sol::init_state(p1, cfg);
  sol::z_update(p1, s1, 1.0, 0.1);
  CHECK(s1.z(0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("z step minimizes its separable objective componentwise") {
  const ProblemInstance prob = random_problem(6, 2, 71);
  sol::Config cfg = base_config();
  sol::State st = sol::init_state(prob, cfg);
  sqreg::Rng rng(72);
  for (int p = 0; p < 2; ++p) st.w(p) = rng.next_uniform(-1.0, 1.0);
  st.r = prob.X * st.w;
  for (int i = 0; i < 6; ++i) st.psi(i) = rng.next_uniform(-0.3, 0.3);
  const double sigma = 1.3, mu = 0.4, tau = prob.tau;
  sol::z_update(prob, st, sigma, mu);
  for (int i = 0; i < 6; ++i) {
    const double target = prob.y(i) - st.r(i);
    const auto component = [&](double v) {
      return 0.5 * (sqreg::smoothing::smoothed_abs(v, mu) + (2.0 * tau - 1.0) * v) +
             st.psi(i) * v + 0.5 * sigma * (v - target) * (v - target);
    };
    const double ref = oracles::golden_min(component, -10.0, 10.0);
    CHECK(st.z(i) == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("dual ascent arithmetic") {
  Eigen::MatrixXd X(1, 1);
  X << 1.0;
  Eigen::VectorXd y(1);
  y << 1.0;
  const ProblemInstance prob = ProblemInstance::make(X, y, 0.5);
  sol::Config cfg = base_config();

  // Feasible point: psi unchanged.
  sol::State st = sol::init_state(prob, cfg);
  st.w(0) = 1.0;
  st.r = prob.X * st.w;
  st.z.setZero();
  CHECK(sol::dual_update(prob, st, 2.0) == 0.0);
  CHECK(st.psi(0) == 0.0);

  // Residual 0.1 at sigma 2: psi moves to 0.2.
  st.z(0) = 0.1;
  const double dpsi_sq = sol::dual_update(prob, st, 2.0);
  CHECK(st.psi(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(dpsi_sq == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("multiplier equals the negative smoothed-loss gradient after each iteration") {
  const ProblemInstance prob = random_problem(12, 5, 101);
  sol::Config cfg = base_config();
  cfg.max_iters = 200;
  bool any = false;
  sol::Observer obs = [&](const sol::IterationView& view) {
    any = true;
    const Eigen::VectorXd expect =
        -sqreg::smoothing::h_grad(view.cur->z, view.cur->mu, prob.tau);
    CHECK((view.cur->psi - expect).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(view.cur->psi.lpNorm<Eigen::Infinity>() <=
          std::max(prob.tau, 1.0 - prob.tau) + 1e-8);
  };
  sol::solve(prob, cfg, nullptr, &obs);
  CHECK(any);
}

TEST_CASE("stopping rule accepts fixed points and rejects large residuals") {
  const ProblemInstance prob = random_problem(9, 3, 131);
  sol::Config cfg = base_config();
  sol::State cur = sol::init_state(prob, cfg);
  sqreg::Rng rng(132);
  for (int p = 0; p < 3; ++p) cur.w(p) = rng.next_uniform(-1.0, 1.0);
  cur.r = prob.X * cur.w;
  cur.z = prob.y - cur.r;  // primal-feasible
  cur.psi.setZero();
  sol::State prev = cur;  // dw = dz = 0
  CHECK(sol::stopping_check(prob, prev, cur, cfg));

  // Inflate the primal residual to 10*sqrt(n)*eps1 while keeping dz = 0.
  const ProblemInstance zp =
      ProblemInstance::make(Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4), 0.5);
  sol::State c2 = sol::init_state(zp, cfg);
  c2.z.setConstant(10.0 * cfg.eps1);  // ||z|| = 10*sqrt(n)*eps1, y = 0, w = 0
  sol::State p2 = c2;
  CHECK_FALSE(sol::stopping_check(zp, p2, c2, cfg));

  // Borderline: residual exactly sqrt(n)*eps1 with zero steps passes.
  c2.z.setConstant(cfg.eps1 * 0.999);
  p2 = c2;
  CHECK(sol::stopping_check(zp, p2, c2, cfg));
}

TEST_CASE("zero response with a heavy penalty converges to the zero vector") {
  Eigen::MatrixXd X(8, 5);
  {
    sqreg::Rng rng(77);
    for (int i = 0; i < 8; ++i)
      for (int p = 0; p < 5; ++p) X(i, p) = rng.next_normal();
  }

  // Median case: the z prox target is exactly zero from the first iteration,
  // so the origin is reached exactly and is a clean first-order point.
  const ProblemInstance median = ProblemInstance::make(X, Eigen::VectorXd::Zero(8), 0.5);
  sol::Config cfg = base_config();
  cfg.pen.lambda = 10.0;
  cfg.max_iters = 5000;
  const sol::SolveResult res = sol::solve(median, cfg);
  CHECK(res.termination == sol::Termination::Converged);
  CHECK(res.w.norm() == 0.0);
  CHECK(res.z.norm() == 0.0);
  const auto kkt = sqreg::diag::kkt_residual(median, cfg.pen, res.w, res.z, res.psi);
  CHECK(kkt.primal == 0.0);
  CHECK(kkt.dual_z == 0.0);
  CHECK(kkt.dual_w == 0.0);

  // Asymmetric quantile: still converges to the zero coefficient vector with
  // a near-zero split variable.
  const ProblemInstance skew = ProblemInstance::make(X, Eigen::VectorXd::Zero(8), 0.7);
  const sol::SolveResult res7 = sol::solve(skew, cfg);
  CHECK(res7.termination == sol::Termination::Converged);
  CHECK(res7.w.norm() == 0.0);
  CHECK(res7.z.lpNorm<Eigen::Infinity>() <= 1e-2);
}

TEST_CASE("identical inputs give bitwise-identical traces") {
  const ProblemInstance prob = random_problem(20, 8, 140);
  sol::Config cfg = base_config();
  cfg.max_iters = 300;
  sol::Truth truth;
  truth.w_true = Eigen::VectorXd::Zero(8);
  truth.active_set = {0, 2};
  const sol::SolveResult a = sol::solve(prob, cfg, &truth);
  const sol::SolveResult b = sol::solve(prob, cfg, &truth);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(std::memcmp(&a.trace[i], &b.trace[i], sizeof(sol::IterationRecord)) == 0);
  }
  CHECK(a.w == b.w);
  CHECK(a.psi == b.psi);
}

TEST_CASE("trace cadence honors the stride and always includes the last iteration") {
  const ProblemInstance prob = random_problem(15, 6, 150);
  sol::Config cfg = base_config();
  cfg.max_iters = 23;
  cfg.trace_stride = 7;
  const sol::SolveResult res = sol::solve(prob, cfg);
  std::vector<long> ks;
  for (const auto& rec : res.trace) ks.push_back(rec.k);
  CHECK(ks == std::vector<long>{1, 8, 15, 22, 23});
}

TEST_CASE("first dual-drift slack is undefined, later ones respect the bound") {
  const ProblemInstance prob = random_problem(15, 6, 160);
  sol::Config cfg = base_config();
  cfg.max_iters = 50;
  const sol::SolveResult res = sol::solve(prob, cfg);
  REQUIRE(res.trace.size() >= 3);
  CHECK(std::isnan(res.trace[0].lemma7_slack));
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(std::isfinite(res.trace[i].lemma7_slack));
    CHECK(res.trace[i].lemma7_slack >= -1e-8);
  }
}

TEST_CASE("threshold iteration is the first time sigma clears the descent bound") {
  const ProblemInstance prob = random_problem(30, 10, 170);
  sol::Config cfg = base_config();
  cfg.max_iters = 4000;
  const sol::SolveResult res = sol::solve(prob, cfg);
  const double threshold = sqreg::diag::descent_sigma_threshold(prob, cfg.pen);
  REQUIRE(res.threshold_iteration > 0);
  // sigma at completed iteration k is sigma_schedule(k-1).
  CHECK(sol::sigma_schedule(res.threshold_iteration - 1, cfg) > threshold);
  if (res.threshold_iteration > 1) {
    CHECK(sol::sigma_schedule(res.threshold_iteration - 2, cfg) <= threshold);
  }
}

TEST_CASE("burn-in freezes the schedule, then growth resumes") {
  const ProblemInstance prob = random_problem(10, 4, 180);
  sol::Config cfg = base_config();
  cfg.burn_in = 5;
  cfg.max_iters = 12;
  cfg.eps1 = 1e-12;  // keep it from stopping early
  cfg.eps2 = 1e-12;
  const sol::SolveResult res = sol::solve(prob, cfg);
  REQUIRE(res.trace.size() >= 10);
  for (int i = 0; i < 5; ++i) {
    CHECK(res.trace[i].sigma == doctest::Approx(cfg.sigma0));
    CHECK(res.trace[i].mu == doctest::Approx(cfg.beta / cfg.sigma0));
  }
  CHECK(res.trace[6].sigma > cfg.sigma0);
}
