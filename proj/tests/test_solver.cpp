#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "prefband/logistic.hpp"
#include "prefband/solver.hpp"
#include "support.hpp"

#include <cmath>

using namespace prefband;
using namespace prefband::test;

TEST_CASE("fit_mle: empty data gives zero") {
  const FitResult fit = fit_mle({}, 3.0, {}, 1.0, Vector(Vector::Zero(4)));
  CHECK(fit.converged);
  CHECK(fit.estimate.theta.norm() == 0.0);
}

TEST_CASE("fit_mle: d=1 fixed point against bisection oracle") {
  // maximizer of log σ(θ) − θ²/2 solves 1 − σ(θ) = θ; bisect that equation.
  auto residual = [](double t) { return 1.0 - sigmoid(t) - t; };
  double lo = 0.0, hi = 1.0;
  REQUIRE(residual(lo) > 0.0);
  REQUIRE(residual(hi) < 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  const double oracle = 0.5 * (lo + hi);
  CHECK(oracle == doctest::Approx(0.40105813754154704).epsilon(1e-12));

  Dataset data{Observation(Vector::Ones(1), 1)};
  const FitResult fit = fit_mle(data, 1.0);
  CHECK(fit.converged);
  CHECK(fit.estimate.theta[0] == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("fit_mle: objective beats a 201x201 grid oracle") {
  RngStream rng(21);
  const Instance inst = random_instance(2, 20, 1.0, rng);
  const FitResult fit = fit_mle(inst.data, inst.reg_weight);
  REQUIRE(fit.converged);
  const double best = log_likelihood(fit.estimate, inst.data);

  double grid_best = -1e300;
  for (int i = 0; i < 201; ++i) {
    for (int j = 0; j < 201; ++j) {
      Vector th(2);
      th << -3.0 + 6.0 * i / 200.0, -3.0 + 6.0 * j / 200.0;
      grid_best = std::max(grid_best, log_likelihood(ModelParams(th, 1.0, inst.reg_weight), inst.data));
    }
  }
  CHECK(best >= grid_best);
}

TEST_CASE("fit_mle: uniqueness from distinct starts") {
  RngStream rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = random_instance(3, 25, 0.5, rng);
    const FitResult from_zero = fit_mle(inst.data, inst.reg_weight);
    const FitResult from_random =
        fit_mle(inst.data, inst.reg_weight, {}, 1.0, Vector(3.0 * rng.gaussian_vector(3)));
    CHECK(from_zero.converged);
    CHECK(from_random.converged);
    CHECK((from_zero.estimate.theta - from_random.estimate.theta).norm() < 1e-6);
  }
}

TEST_CASE("fit_mle: line search objective is non-decreasing") {
  RngStream rng(23);
  const Instance inst = random_instance(4, 40, 0.3, rng);
  const FitResult fit = fit_mle(inst.data, inst.reg_weight);
  REQUIRE(fit.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
    CHECK(fit.objective_trace[i] >= fit.objective_trace[i - 1] - 1e-10);
  }
}

TEST_CASE("fit_mle: first-order optimality identity g(θ̂) = Σ r x") {
  RngStream rng(24);
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = random_instance(2, 30, 1.0, rng);
    const SolverConfig config;
    const FitResult fit = fit_mle(inst.data, inst.reg_weight, config);
    REQUIRE(fit.converged);
    Vector label_sum = Vector::Zero(2);
    for (const Observation& o : inst.data) label_sum += o.outcome() * o.features();
    CHECK((g_function(fit.estimate, inst.data) - label_sum).norm() <= 10.0 * config.tolerance);
  }
}

TEST_CASE("fit_mle: non-convergence reports honestly") {
  RngStream rng(25);
  const Instance inst = random_instance(4, 50, 0.2, rng);
  SolverConfig strangled;
  strangled.max_iterations = 1;
  strangled.tolerance = 1e-12;
  const FitResult fit = fit_mle(inst.data, inst.reg_weight, strangled);
  CHECK_FALSE(fit.converged);
  CHECK(fit.final_gradient_norm > strangled.tolerance);
}

TEST_CASE("project_nl: interior estimate returns itself") {
  RngStream rng(26);
  const Instance inst = random_instance(3, 20, 2.0, rng);
  const FitResult fit = fit_mle(inst.data, inst.reg_weight);
  REQUIRE(fit.estimate.theta.norm() <= 1.0);  // heavy regularization keeps it inside
  const NlProjectionResult proj = project_nl(fit.estimate, inst.data, 1.0);
  CHECK(proj.converged);
  CHECK(proj.objective == 0.0);
  CHECK((proj.point.theta - fit.estimate.theta).norm() == 0.0);
}

TEST_CASE("project_nl: empty data projects radially") {
  // g(θ) = λθ, so the objective is √λ‖θ − θ̂‖, minimized on the ray.
  Vector theta_hat(2);
  theta_hat << 2.0, 0.0;
  const ModelParams params(theta_hat, 1.0, 1.5);
  const NlProjectionResult proj = project_nl(params, {}, 1.0);
  CHECK(proj.converged);
  CHECK(proj.point.theta[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(proj.point.theta[1]) < 1e-8);
  // 1-D oracle along the ray t·e1: objective √λ|t−2| is minimized at t=1
  const double expected_objective = std::sqrt(1.5) * 1.0;
  CHECK(proj.objective == doctest::Approx(expected_objective).epsilon(1e-6));
}

TEST_CASE("project_nl: beats rejection-sampled points of the ball") {
  RngStream rng(27);
  const int d = 2;
  Instance inst = random_instance(d, 8, 0.05, rng);  // weak reg lets ‖θ̂‖ exceed 1
  FitResult fit = fit_mle(inst.data, inst.reg_weight);
  int guard = 0;
  while (fit.estimate.theta.norm() <= 1.0 && guard < 50) {
    inst = random_instance(d, 8, 0.05, rng);
    fit = fit_mle(inst.data, inst.reg_weight);
    ++guard;
  }
  REQUIRE(fit.estimate.theta.norm() > 1.0);

  SolverConfig gentle;
  gentle.tolerance = 1e-10;
  gentle.max_iterations = 200;
  const NlProjectionResult proj = project_nl(fit.estimate, inst.data, 1.0, gentle);
  const HessianMatrix metric = hessian(fit.estimate, inst.data);
  const Vector g_hat = g_function(fit.estimate, inst.data);
  auto objective = [&](const Vector& th) {
    const Vector diff = g_function(ModelParams(th, 1.0, inst.reg_weight), inst.data) - g_hat;
    return inverse_metric_norm(metric, diff);
  };
  CHECK(proj.objective == doctest::Approx(objective(proj.point.theta)).epsilon(1e-9));
  for (int i = 0; i < 10000; ++i) {
    CHECK(proj.objective <= objective(rng.ball(d, 1.0)) + 1e-9);
  }
}
