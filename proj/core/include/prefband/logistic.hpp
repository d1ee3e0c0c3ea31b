#pragma once

#include "prefband/types.hpp"

namespace prefband {

/// Numerically stable logistic function 1/(1+e^{-z}), branched on the sign
/// of z so no exp overflows for |z| up to DBL_MAX. The result is clamped
/// into the open interval (0, 1).
double sigmoid(double z) noexcept;

/// σ̇(z) = σ(z)(1−σ(z)) ∈ (0, 0.25], evaluated through the small branch so
/// the tails keep full relative accuracy.
double sigmoid_derivative(double z) noexcept;

/// log σ(z) = −log(1+e^{−z}), stable for all finite z.
double log_sigmoid(double z) noexcept;

/// softplus(z) = log(1+e^{z}).
double softplus(double z) noexcept;

/// Regularized Bernoulli log-likelihood
///   Σ_s [r_s log σ(x_sᵀθ) + (1−r_s) log(1−σ(x_sᵀθ))] − (λ/2)‖θ‖².
/// Empty data gives the bare regularizer term.
double log_likelihood(const ModelParams& params, const Dataset& data);

/// Gradient of log_likelihood: Σ_s (r_s − σ(x_sᵀθ)) x_s − λθ.
Vector score_gradient(const ModelParams& params, const Dataset& data);

/// The label-free map g(θ) = Σ_s σ(x_sᵀθ) x_s + λθ. At the exact
/// unconstrained MLE, g(θ̂) = Σ_s r_s x_s (labels cancel through
/// first-order optimality).
Vector g_function(const ModelParams& params, const Dataset& data);

/// Design Hessian Σ_s σ̇(x_sᵀθ) x_s x_sᵀ + λI at θ.
HessianMatrix hessian(const ModelParams& params, const Dataset& data);

}  // namespace prefband
