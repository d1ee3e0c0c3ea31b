#pragma once

#include "prefband/rng.hpp"
#include "prefband/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace prefband {

/// One Bernoulli interaction viewed as martingale noise: ε = p − r is
/// centered, bounded by 1, and the paired weight ω enters both the MGF
/// hypothesis and the design matrix.
struct NoiseDraw {
  double epsilon;
  double weight;
  int outcome;
};

/// Draws r ~ Bernoulli(p) and returns ε = p − r together with the weight
/// ω = min(1, κ·p(1−p)). p must lie strictly inside (0,1).
NoiseDraw noise_model(double p, double kappa, RngStream& rng);

/// Running state of the exponential process M_t(ξ) = exp(ξᵀS_t − Q_t(ξ))
/// with S_t = Σ ε_s x_s and Q_t(ξ) = Σ ω_s (ξᵀx_s)². A fresh trace is the
/// empty-sum state S = 0, Q = 0, M = 1.
class MartingaleTrace {
 public:
  explicit MartingaleTrace(Vector xi);

  /// Appends one step (x, ε, ω). Rejects ‖x‖ > 1, |ε| > 1, ω outside [0,1].
  void update(const Vector& x, double epsilon, double weight);

  const Vector& xi() const { return xi_; }
  int steps() const { return static_cast<int>(weights_.size()); }

  Vector s() const;
  double q() const;
  double m() const;

  const std::vector<Vector>& s_values() const { return s_values_; }
  const std::vector<double>& q_values() const { return q_values_; }
  const std::vector<double>& m_values() const { return m_values_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  Vector xi_;
  std::vector<Vector> s_values_;
  std::vector<double> q_values_;
  std::vector<double> m_values_;
  std::vector<double> weights_;
};

/// How the weights ω_s are instantiated along a simulated stream.
enum class WeightMode {
  TrueProbability,  // ω = min(1, κ σ̇(x_sᵀθ*)) — the exact-MGF-backed choice
  Estimate,         // ω = min(1, κ σ̇(x_sᵀθ̂_s)) — filtration-adapted plug-in
  One,              // ω ≡ 1, the classic sub-Gaussian envelope
  Zero,             // ω ≡ 0, negative control: MGF hypothesis violated
};

std::string weight_mode_name(WeightMode mode);

struct MartingaleConfig {
  int dim = 2;
  int horizon = 50;
  int replicates = 10000;  // conditional resamples per step
  int n_xi = 8;            // ξ directions: canonical axes first, then random
  double reg_weight = 1.0;
  double norm_bound = 1.0;
  double kappa = 2.0;
  WeightMode weight_mode = WeightMode::Estimate;
  double delta = 0.1;        // tail-bound confidence level
  int n_trajectories = 500;  // tail-bound Monte Carlo size
  double radius_scale = 1.0; // shrink factor for negative controls
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

/// Statistical verdict serializable to a JSON record.
struct CheckReport {
  std::string check_name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  long n_replicates = 0;
  std::uint64_t seed = 0;

  std::string to_json_string() const;
};

/// Exact two-point MGF check: for p = σ(z) over a (z, λ) grid, verifies
/// E[e^{λε}] ≤ e^{ωλ²} + 1e-12 with ω = min(1, κ p(1−p)). The expectation
/// is the exact two-point sum, no sampling. Runs before any trajectory
/// work relies on the weight instantiation.
CheckReport mgf_two_point_check(double kappa, int z_points = 121, int lambda_points = 81);

/// Simulates one logistic stream and, at every step and every ξ, estimates
/// the one-step ratio E[M_t | F_{t-1}] / M_{t-1} by resampling the final
/// increment conditional on the realized prefix. Reports the maximum of
/// (estimate − 1)/SE over all cells; PASS when that max is ≤ 3.
CheckReport verify_supermartingale(const MartingaleConfig& config);

/// Runs independent trajectories and checks the anytime bound
/// ‖S_t‖_{H_t(θ̂_t)⁻¹} ≤ γ_t(δ) at every step, with the design-matrix
/// weights re-evaluated at the current estimate. Reports the violation
/// rate; PASS when rate ≤ δ + 3√(δ(1−δ)/N).
CheckReport verify_theorem_bound(const MartingaleConfig& config);

}  // namespace prefband
