#include "prefband/logistic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace prefband {

namespace {

void check_dims(const ModelParams& params, const Dataset& data, const char* who) {
  for (const Observation& obs : data) {
    if (obs.dim() != params.dim()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}

// Largest double strictly below 1.
const double kOneMinus = std::nextafter(1.0, 0.0);
const double kTiny = std::numeric_limits<double>::denorm_min();

}  // namespace

double sigmoid(double z) noexcept {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  if (s >= 1.0) s = kOneMinus;
  if (s <= 0.0) s = kTiny;
  return s;
}

double sigmoid_derivative(double z) noexcept {
  // σ̇ is even in z; the negative branch keeps the small factor accurate.
  const double e = std::exp(-std::abs(z));
  const double s = e / (1.0 + e);
  return s * (1.0 - s);
}

double softplus(double z) noexcept {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double log_sigmoid(double z) noexcept { return -softplus(-z); }

double log_likelihood(const ModelParams& params, const Dataset& data) {
  check_dims(params, data, "log_likelihood");
  double ll = 0.0;
  for (const Observation& obs : data) {
    const double z = obs.features().dot(params.theta);
    // r log σ(z) + (1−r) log(1−σ(z)) = r z − softplus(z)
    ll += static_cast<double>(obs.outcome()) * z - softplus(z);
  }
  return ll - 0.5 * params.reg_weight * params.theta.squaredNorm();
}

Vector score_gradient(const ModelParams& params, const Dataset& data) {
  check_dims(params, data, "score_gradient");
  Vector grad = -params.reg_weight * params.theta;
  for (const Observation& obs : data) {
    const double z = obs.features().dot(params.theta);
    grad += (static_cast<double>(obs.outcome()) - sigmoid(z)) * obs.features();
  }
  return grad;
}

Vector g_function(const ModelParams& params, const Dataset& data) {
  check_dims(params, data, "g_function");
  Vector g = params.reg_weight * params.theta;
  for (const Observation& obs : data) {
    g += sigmoid(obs.features().dot(params.theta)) * obs.features();
  }
  return g;
}

HessianMatrix hessian(const ModelParams& params, const Dataset& data) {
  check_dims(params, data, "hessian");
  const Eigen::Index d = params.dim();
  Matrix h = Matrix::Zero(d, d);
  for (const Observation& obs : data) {
    const double w = sigmoid_derivative(obs.features().dot(params.theta));
    h.selfadjointView<Eigen::Lower>().rankUpdate(obs.features(), w);
  }
  h = h.selfadjointView<Eigen::Lower>();
  h.diagonal().array() += params.reg_weight;
  return HessianMatrix(std::move(h), params.theta, params.reg_weight);
}

}  // namespace prefband
