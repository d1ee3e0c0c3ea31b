#pragma once

#include "prefband/confidence.hpp"
#include "prefband/mf.hpp"
#include "prefband/records.hpp"
#include "prefband/rng.hpp"
#include "prefband/selection.hpp"
#include "prefband/solver.hpp"
#include "prefband/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace prefband {

enum class ThetaPolicy { Fixed, Sphere, Ball };
enum class FeaturePolicy { Sphere, FixedPool, BasisCycle };

/// Synthetic-world description: where θ* comes from and how query features
/// are generated. Generated θ* always satisfies ‖θ*‖ ≤ S and features
/// ‖x‖ ≤ 1.
struct WorldSpec {
  int dim = 3;
  double norm_bound = 1.0;
  ThetaPolicy theta_policy = ThetaPolicy::Sphere;
  Vector theta_fixed;  // used when theta_policy == Fixed
  FeaturePolicy feature_policy = FeaturePolicy::Sphere;
  int pool_size = 100;  // FixedPool features draw from a per-trial pool
  std::uint64_t seed = 0;

  void validate() const;
};

Vector draw_theta_star(const WorldSpec& spec, RngStream& rng);

/// Per-trial feature generator for the configured policy.
class FeatureSource {
 public:
  FeatureSource(const WorldSpec& spec, RngStream& rng);
  Vector next(RngStream& rng);

 private:
  const WorldSpec& spec_;
  std::vector<Vector> pool_;
  int cursor_ = 0;
};

enum class SetKind { Exp, Nl, Corollary1 };
std::string set_kind_name(SetKind kind);

struct CoverageConfig {
  WorldSpec world;
  int horizon = 200;
  double delta = 0.1;
  int n_trials = 500;
  SetKind set_kind = SetKind::Exp;
  double reg_weight = 1.0;
  double self_concordance_const = 1.0;
  double gamma_scale = 1.0;
  double radius_scale = 1.0;  // scaled radii; 0 is the degenerate negative control
  SolverConfig solver;
  std::string label = "coverage";
  int jobs = 1;

  void validate() const;
};

/// One simulated stream of the coverage experiment: per-round records
/// plus the anytime verdict. run_coverage aggregates these over trials;
/// exposed separately so single-stream diagnostics share the exact same
/// path.
struct StreamTrialResult {
  std::vector<ExperimentRecord> rows;
  bool covered_at_every_round = false;
  long solver_failures = 0;
  long vacuous_radii = 0;
};

StreamTrialResult run_stream_trial(const CoverageConfig& config, int trial);

struct CoverageSummary {
  double anytime_coverage = 0.0;
  double threshold = 0.0;  // 1−δ − 3√(δ(1−δ)/n)
  bool enforced = true;    // the NL set's rate is reported, not gated
  bool pass = false;
  long solver_failures = 0;
  long vacuous_radii = 0;
  std::vector<double> per_round_coverage;
};

/// Simulates logistic streams, refits every round, and checks whether θ*
/// stays inside the chosen set at every round of every trial (the anytime
/// event). Records one row per (trial, round).
CoverageSummary run_coverage(const CoverageConfig& config, std::vector<ExperimentRecord>* records);

struct ActiveBenchConfig {
  int dim = 8;
  double norm_bound = 2.5;
  double reg_weight = 1.0;
  double delta = 0.1;
  int pool_size = 100;
  int horizon = 60;
  int n_seeds = 20;
  PoolPolicy pool_policy = PoolPolicy::FreshPool;
  double efficiency_threshold = 1.3;
  SolverConfig solver;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

/// Per-round records for one adaptation run: estimate errors, the
/// ζ-radius ellipsoid check against the world's λ*, and the tail
/// statistic, replayed over data prefixes.
std::vector<ExperimentRecord> adaptation_records(const AdaptationResult& run,
                                                 const PreferenceWorld& world, double reg_weight,
                                                 double delta, const std::string& experiment,
                                                 const std::string& strategy, int trial,
                                                 std::uint64_t seed);

struct ActiveBenchSummary {
  double efficiency_ratio = 0.0;
  double target_error = 0.0;  // the random strategy's median final error
  int rounds_random = 0;
  int rounds_uncertainty = 0;
  double threshold = 0.0;
  bool pass = false;
  std::vector<double> median_error_uncertainty;  // per round
  std::vector<double> median_error_random;
};

/// Head-to-head uncertainty vs random selection under common random
/// numbers: each seed shares θ*, candidate pools, and the response uniform
/// stream across both strategies. The efficiency ratio divides the rounds
/// the random strategy needs to reach its own median final error by the
/// rounds the uncertainty strategy needs for the same error.
ActiveBenchSummary run_active_benchmark(const ActiveBenchConfig& config,
                                        std::vector<ExperimentRecord>* records);

struct MfScalingConfig {
  std::vector<std::pair<int, int>> grid = {{25, 100}, {50, 200}, {100, 400}};
  int rank = 3;
  int n_seeds = 10;
  double norm_bound = 1.5;  // B for truth columns and the fit cap
  double delta = 0.1;
  double reg_weight = 0.05;
  double mu_min = 1.0;     // Assumption-2 floor enforced on drawn truths
  int resample_cap = 100;
  double slope_lo = -0.75;
  double slope_hi = -0.25;
  double c_spread_max = 3.0;
  MfFitConfig fit;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

struct MfScalingSummary {
  std::vector<double> median_errors;  // per grid cell, probability scale
  std::vector<double> fitted_c;       // per grid cell
  double slope = 0.0;                 // log median error vs log NM/(N+M)
  bool monotone = false;
  bool slope_ok = false;
  double c_spread = 0.0;
  bool pass = false;
};

/// Ground-truth factors are drawn per (cell, seed) with the user-covariance
/// eigenvalue floor re-sampled up to resample_cap times; full matrices are
/// sampled, fit from the SVD initialization, and scored on probability
/// scale against the truth.
MfScalingSummary run_mf_scaling(const MfScalingConfig& config,
                                std::vector<ExperimentRecord>* records);

struct MfInitStabilityConfig {
  int n_users = 40;
  int n_items = 120;
  int rank = 3;
  int n_seeds = 10;
  double norm_bound = 2.5;   // sharp preferences expose init sensitivity
  double reg_weight = 0.05;
  double mu_min = 1.0;
  double mask_density = 0.3;  // fraction of entries observed in training
  int resample_cap = 100;
  MfFitConfig fit{.max_sweeps = 15};  // fixed optimization budget
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

struct MfInitStabilitySummary {
  double svd_std = 0.0;     // std over seeds of held-out log-loss, SVD init
  double random_std = 0.0;  // same, random init
  bool pass = false;        // svd_std <= random_std
  std::vector<double> svd_log_loss;
  std::vector<double> random_log_loss;
};

/// One fixed ground truth; per seed, fresh train/eval draws and a fresh
/// random initialization, fit both ways, compare the spread of held-out
/// log-loss.
MfInitStabilitySummary run_mf_init_stability(const MfInitStabilityConfig& config,
                                             std::vector<ExperimentRecord>* records);

}  // namespace prefband
