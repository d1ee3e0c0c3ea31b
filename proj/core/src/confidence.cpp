#include "prefband/confidence.hpp"

#include "prefband/logistic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace prefband {

void RadiusParams::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("RadiusParams: delta must lie in (0,1]");
  if (dim < 1) throw std::invalid_argument("RadiusParams: dim must be >= 1");
  if (reg_weight <= 0.0) throw std::invalid_argument("RadiusParams: reg_weight must be positive");
  if (norm_bound <= 0.0) throw std::invalid_argument("RadiusParams: norm_bound must be positive");
  if (self_concordance_const < 1.0)
    throw std::invalid_argument("RadiusParams: self_concordance_const must be >= 1");
  if (gamma_scale <= 0.0) throw std::invalid_argument("RadiusParams: gamma_scale must be positive");
}

double tail_radius(const HessianMatrix& hessian, const RadiusParams& params) {
  params.validate();
  if (hessian.dim() != params.dim) throw std::invalid_argument("tail_radius: dimension mismatch");
  const double lambda = params.reg_weight;
  const double d = static_cast<double>(params.dim);
  const double sqrt_lambda = std::sqrt(lambda);
  // log(λ^{−d/2} det(H)^{1/2} / δ) without forming the determinant.
  const double log_ratio = 0.5 * (hessian.log_det() - d * std::log(lambda)) - std::log(params.delta);
  const double gamma =
      0.5 * sqrt_lambda + (2.0 / sqrt_lambda) * log_ratio + (2.0 * d / sqrt_lambda) * std::log(2.0);
  return params.gamma_scale * gamma;
}

double expansion_exponent(double gamma, const RadiusParams& params) {
  params.validate();
  if (gamma < 0.0) throw std::invalid_argument("expansion_exponent: gamma must be nonnegative");
  return 2.0 * params.self_concordance_const * (2.0 + 4.0 * params.norm_bound) * gamma /
         std::sqrt(params.reg_weight);
}

double expansion_factor(double gamma, const RadiusParams& params) {
  const double r = expansion_exponent(gamma, params);
  if (r > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(r);
}

double zeta_radius(double gamma, const RadiusParams& params) {
  return expansion_factor(gamma, params) * (2.0 + 4.0 * params.norm_bound) * gamma;
}

ConfidenceEllipsoid build_exp_set(const ModelParams& center, const HessianMatrix& hessian_at_center,
                                  const RadiusParams& params) {
  params.validate();
  RadiusParams halved = params;
  halved.delta = 0.5 * params.delta;
  const double gamma = tail_radius(hessian_at_center, halved);
  return ConfidenceEllipsoid{center.theta, hessian_at_center, zeta_radius(gamma, halved), params.delta};
}

ConfidenceEllipsoid build_star_set(const ModelParams& center, const HessianMatrix& metric,
                                   const RadiusParams& params) {
  const double gamma = tail_radius(metric, params);
  return ConfidenceEllipsoid{center.theta, metric, (2.0 + 4.0 * params.norm_bound) * gamma,
                             params.delta};
}

void ConfidenceEllipsoid::validate() const {
  if (center.size() != metric.dim())
    throw std::invalid_argument("ConfidenceEllipsoid: center dimension mismatch");
  if (!(radius >= 0.0)) throw std::invalid_argument("ConfidenceEllipsoid: radius must be >= 0");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("ConfidenceEllipsoid: delta must lie in (0,1]");
}

bool contains(const ConfidenceEllipsoid& set, const Vector& point) {
  set.validate();
  if (point.size() != set.center.size()) throw std::invalid_argument("contains: dimension mismatch");
  return metric_norm(set.metric, point - set.center) <= set.radius + 1e-12;
}

double max_linear(const ConfidenceEllipsoid& set, const Vector& direction) {
  set.validate();
  if (direction.size() != set.center.size())
    throw std::invalid_argument("max_linear: dimension mismatch");
  return set.center.dot(direction) + set.radius * inverse_metric_norm(set.metric, direction);
}

ComparabilityReport hessian_comparability(const Dataset& data, const ModelParams& theta_a,
                                          const ModelParams& theta_b, double R) {
  if (theta_a.dim() != theta_b.dim())
    throw std::invalid_argument("hessian_comparability: dimension mismatch");
  if (theta_a.reg_weight != theta_b.reg_weight)
    throw std::invalid_argument("hessian_comparability: reg_weight mismatch");
  if (R < 0.0) throw std::invalid_argument("hessian_comparability: R must be nonnegative");

  const HessianMatrix ha = hessian(theta_a, data);
  const HessianMatrix hb = hessian(theta_b, data);

  ComparabilityReport report;
  report.displacement = metric_norm(hb, theta_a.theta - theta_b.theta);
  report.premise = report.displacement <= R + 1e-12;

  const Matrix upper_gap = std::exp(R) * hb.matrix() - ha.matrix();
  const Matrix lower_gap = ha.matrix() - std::exp(-R) * hb.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> upper_eig(upper_gap, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> lower_eig(lower_gap, Eigen::EigenvaluesOnly);
  report.upper = upper_eig.eigenvalues().minCoeff() >= -1e-10;
  report.lower = lower_eig.eigenvalues().minCoeff() >= -1e-10;
  return report;
}

double g_gap_statistic(const ModelParams& theta_hat, const ModelParams& theta_star,
                            const Dataset& data) {
  if (theta_hat.dim() != theta_star.dim())
    throw std::invalid_argument("g_gap_statistic: dimension mismatch");
  if (theta_hat.reg_weight != theta_star.reg_weight)
    throw std::invalid_argument("g_gap_statistic: reg_weight mismatch");
  const HessianMatrix h = hessian(theta_hat, data);
  const Vector diff = g_function(theta_hat, data) - g_function(theta_star, data);
  return inverse_metric_norm(h, diff);
}

}  // namespace prefband
