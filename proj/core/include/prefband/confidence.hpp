#pragma once

#include "prefband/types.hpp"

namespace prefband {

/// Constants entering the radius formulas.
struct RadiusParams {
  double delta = 0.1;                  // confidence parameter in (0,1]
  int dim = 1;                         // d
  double reg_weight = 1.0;             // λ
  double norm_bound = 1.0;             // S
  double self_concordance_const = 1.0; // c ≥ 1
  double gamma_scale = 1.0;            // multiplier on γ, for sensitivity studies

  void validate() const;
};

/// Base tail radius
///   γ(δ) = √λ/2 + (2/√λ) log(λ^{−d/2} det(H)^{1/2} / δ) + (2d/√λ) log 2,
/// scaled by gamma_scale. Depends on H only through its determinant.
double tail_radius(const HessianMatrix& hessian, const RadiusParams& params);

/// Exponent R(δ) = 2c(2+4S)γ/√λ of the metric-transfer factor.
double expansion_exponent(double gamma, const RadiusParams& params);

/// e^{R(δ)}. Returns +inf once R exceeds 700 — callers treat a non-finite
/// radius as vacuous and record it as such.
double expansion_factor(double gamma, const RadiusParams& params);

/// Expanded radius ζ = e^{R(δ)} (2+4S) γ for a set metered at the estimate.
double zeta_radius(double gamma, const RadiusParams& params);

/// Ellipsoid {θ : ‖θ − center‖_metric ≤ radius}. A non-finite radius is
/// a vacuous set (the transfer factor overflowed) and still orders
/// correctly in membership tests.
struct ConfidenceEllipsoid {
  Vector center;
  HessianMatrix metric;
  double radius;
  double delta;

  void validate() const;
};

/// Set with metric H(θ̂) and radius ζ(δ). The union bound over the two
/// tail events is absorbed by running the γ and R formulas at δ/2.
ConfidenceEllipsoid build_exp_set(const ModelParams& center, const HessianMatrix& hessian_at_center,
                                  const RadiusParams& params);

/// Set with radius (2+4S)γ(δ) and whichever metric the caller supplies
/// (H(θ*) for oracle checks, H(θ̂) for the nonlinear-projection set).
ConfidenceEllipsoid build_star_set(const ModelParams& center, const HessianMatrix& metric,
                                   const RadiusParams& params);

/// Membership test with a 1e-12 slack on the boundary.
bool contains(const ConfidenceEllipsoid& set, const Vector& point);

/// Closed-form maximum of ⟨θ, direction⟩ over the ellipsoid:
/// ⟨center, direction⟩ + radius · ‖direction‖_{metric⁻¹}.
double max_linear(const ConfidenceEllipsoid& set, const Vector& direction);

/// PSD verdicts for e^{−R} H(θ_b) ⪯ H(θ_a) ⪯ e^{R} H(θ_b), each by
/// min-eigenvalue ≥ −1e-10. `premise` reports whether the displacement
/// ‖θ_a − θ_b‖_{H(θ_b)} actually sits inside R.
struct ComparabilityReport {
  bool upper = false;     // e^R H(θ_b) − H(θ_a) PSD
  bool lower = false;     // H(θ_a) − e^{−R} H(θ_b) PSD
  bool premise = false;
  double displacement = 0.0;
};

ComparabilityReport hessian_comparability(const Dataset& data, const ModelParams& theta_a,
                                          const ModelParams& theta_b, double R);

/// ‖g(θ̂) − g(θ*)‖_{H(θ̂)⁻¹}, the quantity the anytime tail bound controls.
double g_gap_statistic(const ModelParams& theta_hat, const ModelParams& theta_star,
                            const Dataset& data);

}  // namespace prefband
