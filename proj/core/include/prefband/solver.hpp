#pragma once

#include "prefband/types.hpp"

#include <optional>
#include <vector>

namespace prefband {

struct SolverConfig {
  double tolerance = 1e-10;       // gradient-norm stopping criterion
  int max_iterations = 100;
  double line_search_shrink = 0.5;

  void validate() const;
};

/// Outcome of a regularized-MLE fit. `converged` implies
/// final_gradient_norm ≤ tolerance; on non-convergence the best iterate is
/// returned with converged = false, never a silent wrong answer.
struct FitResult {
  ModelParams estimate;
  double final_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each accepted step
};

/// Newton ascent with backtracking line search from θ = 0 (or the optional
/// warm start). Deterministic given inputs; the objective is strictly
/// concave so the maximizer is unique.
FitResult fit_mle(const Dataset& data, double reg_weight, const SolverConfig& config = {},
                  double norm_bound = 1.0, const std::optional<Vector>& warm_start = std::nullopt);

/// Result of projecting the MLE onto Θ = {‖θ‖ ≤ S} through the g-map:
/// point minimizes ‖g(θ) − g(θ̂)‖_{H(θ̂)⁻¹} over Θ; `objective` is that
/// norm at the result.
struct NlProjectionResult {
  ModelParams point;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient descent on the squared objective with projection
/// onto the S-ball. When ‖θ̂‖ ≤ S the answer is θ̂ itself with objective 0.
NlProjectionResult project_nl(const ModelParams& theta_hat, const Dataset& data,
                              double norm_bound, const SolverConfig& config = {});

}  // namespace prefband
