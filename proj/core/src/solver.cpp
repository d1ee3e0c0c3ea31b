#include "prefband/solver.hpp"

#include "prefband/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace prefband {

void SolverConfig::validate() const {
  if (tolerance < 1e-12) throw std::invalid_argument("SolverConfig: tolerance below 1e-12");
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  if (!(line_search_shrink > 0.0 && line_search_shrink < 1.0))
    throw std::invalid_argument("SolverConfig: line_search_shrink must lie in (0,1)");
}

FitResult fit_mle(const Dataset& data, double reg_weight, const SolverConfig& config,
                  double norm_bound, const std::optional<Vector>& warm_start) {
  config.validate();
  if (reg_weight <= 0.0) throw std::invalid_argument("fit_mle: reg_weight must be positive");
  const Eigen::Index d =
      !data.empty() ? data.front().dim() : (warm_start ? warm_start->size() : 1);

  Vector theta = warm_start ? *warm_start : Vector::Zero(d);
  if (theta.size() != d) throw std::invalid_argument("fit_mle: warm start dimension mismatch");

  ModelParams params(theta, norm_bound, reg_weight);
  double objective = log_likelihood(params, data);
  Vector grad = score_gradient(params, data);

  FitResult result{params, grad.norm(), 0, false, {objective}};

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const double gnorm = grad.norm();
    if (gnorm <= config.tolerance) {
      result.converged = true;
      break;
    }

    const HessianMatrix h = hessian(params, data);
    const Vector step = h.llt().solve(grad);  // ascent direction: H ≽ λI
    const double slope = grad.dot(step);

    // Inside the quadratic-convergence basin the full step is taken
    // unguarded; objective differences there sit below float noise.
    double eta = 1.0;
    if (gnorm > 1e-6) {
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        ModelParams trial(params.theta + eta * step, norm_bound, reg_weight);
        const double trial_obj = log_likelihood(trial, data);
        if (trial_obj >= objective + 1e-4 * eta * slope) {
          params = std::move(trial);
          objective = trial_obj;
          accepted = true;
          break;
        }
        eta *= config.line_search_shrink;
      }
      if (!accepted) break;  // stalled; report best iterate
    } else {
      params = ModelParams(params.theta + step, norm_bound, reg_weight);
      objective = log_likelihood(params, data);
    }

    grad = score_gradient(params, data);
    result.iterations = iter + 1;
    result.objective_trace.push_back(objective);
  }

  result.estimate = params;
  result.final_gradient_norm = grad.norm();
  if (result.final_gradient_norm <= config.tolerance) result.converged = true;
  return result;
}

namespace {

Vector project_ball(const Vector& v, double radius) {
  const double n = v.norm();
  if (n <= radius) return v;
  return v * (radius / n);
}

}  // namespace

NlProjectionResult project_nl(const ModelParams& theta_hat, const Dataset& data,
                              double norm_bound, const SolverConfig& config) {
  config.validate();
  if (norm_bound <= 0.0) throw std::invalid_argument("project_nl: norm_bound must be positive");

  const double lambda = theta_hat.reg_weight;
  const HessianMatrix metric = hessian(theta_hat, data);
  const Vector g_hat = g_function(theta_hat, data);

  if (theta_hat.theta.norm() <= norm_bound) {
    return {ModelParams(theta_hat.theta, norm_bound, lambda), 0.0, 0, true};
  }

  auto objective_sq = [&](const Vector& theta) {
    ModelParams p(theta, norm_bound, lambda);
    const Vector diff = g_function(p, data) - g_hat;
    return 0.5 * diff.dot(metric.llt().solve(diff));
  };
  auto gradient = [&](const Vector& theta) -> Vector {
    ModelParams p(theta, norm_bound, lambda);
    const Vector diff = g_function(p, data) - g_hat;
    const Vector y = metric.llt().solve(diff);
    // ∇θ g(θ) = H(θ); chain rule through the fixed H(θ̂)⁻¹ metric.
    return hessian(p, data).matrix() * y;
  };

  Vector theta = project_ball(theta_hat.theta, norm_bound);
  double f = objective_sq(theta);
  double eta = 1.0 / std::max(1.0, lambda + static_cast<double>(data.size()) * 0.25);

  NlProjectionResult result{ModelParams(theta, norm_bound, lambda), std::sqrt(2.0 * f), 0, false};
  const int budget = config.max_iterations * 10;

  for (int iter = 0; iter < budget; ++iter) {
    const Vector grad = gradient(theta);
    Vector candidate = project_ball(theta - eta * grad, norm_bound);
    double fc = objective_sq(candidate);

    int shrinks = 0;
    while (fc > f - 1e-4 * grad.dot(theta - candidate) && shrinks < 60) {
      eta *= config.line_search_shrink;
      candidate = project_ball(theta - eta * grad, norm_bound);
      fc = objective_sq(candidate);
      ++shrinks;
    }

    const double move = (candidate - theta).norm();
    if (fc <= f) {
      theta = std::move(candidate);
      f = fc;
      if (shrinks == 0) eta *= 2.0;
    }
    result.iterations = iter + 1;

    if (move <= config.tolerance * std::max(1.0, theta.norm()) || std::sqrt(2.0 * f) <= config.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.point = ModelParams(theta, norm_bound, lambda);
  result.objective = std::sqrt(2.0 * f);
  return result;
}

}  // namespace prefband
