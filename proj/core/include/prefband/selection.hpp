#pragma once

#include "prefband/rng.hpp"
#include "prefband/solver.hpp"
#include "prefband/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace prefband {

/// Candidate query directions φ, each with ‖φ‖ ≤ 1 and a common dimension.
struct CandidatePool {
  std::vector<Vector> candidates;

  explicit CandidatePool(std::vector<Vector> cands);
  Eigen::Index dim() const { return candidates.front().size(); }
  std::size_t size() const { return candidates.size(); }
};

/// Worst-case prediction gap for a candidate over the confidence set:
/// ζ · ‖φ‖_{H⁻¹}.
double uncertainty_score(const Vector& phi, const HessianMatrix& hessian_at_estimate, double zeta);

/// Index of the candidate maximizing ‖φ‖_{H⁻¹}; ties go to the lowest index.
std::size_t select_from_pool(const CandidatePool& pool, const HessianMatrix& hessian);

/// Unit eigenvector for the smallest eigenvalue of H (equivalently the
/// largest of H⁻¹): the direction of maximal uncertainty when any unit φ
/// is realizable. Degenerate eigenvalue ties resolve to the first standard
/// basis vector with a nonzero projection onto the eigenspace; sign is
/// fixed by the first nonzero component being positive.
Vector optimal_direction(const HessianMatrix& hessian);

/// Synthetic user: answers a query φ with Bernoulli(σ(λ*ᵀφ)), consuming a
/// caller-supplied uniform so paired strategy runs can share noise streams.
class PreferenceWorld {
 public:
  PreferenceWorld(Vector lambda_star, double norm_bound);

  const Vector& lambda_star() const { return lambda_star_; }
  double norm_bound() const { return norm_bound_; }
  Eigen::Index dim() const { return lambda_star_.size(); }

  int respond(const Vector& phi, double uniform_draw) const;

 private:
  Vector lambda_star_;
  double norm_bound_;
};

enum class PoolPolicy { FixedPool, FreshPool, OptimalDirection };
enum class Strategy { Uncertainty, Random };

std::string strategy_name(Strategy s);

struct AdaptationConfig {
  int rounds = 40;
  double reg_weight = 1.0;
  double norm_bound = 1.0;
  double delta = 0.1;  // only scales the reported ζ; never changes the argmax
  PoolPolicy pool_policy = PoolPolicy::FreshPool;
  Strategy strategy = Strategy::Uncertainty;
  int pool_size = 100;
  SolverConfig solver;

  void validate() const;
};

struct AdaptationRound {
  int round = 0;
  std::ptrdiff_t selected = -1;  // pool index, or -1 for a synthesized direction
  int outcome = 0;
  double score = 0.0;            // ζ·‖φ‖_{H⁻¹} of the chosen candidate
  double estimate_error = 0.0;   // ‖λ_t − λ*‖₂ after the refit
  bool solver_converged = true;
};

struct AdaptationResult {
  std::vector<AdaptationRound> history;
  std::vector<Vector> estimates;  // λ_t after each round's refit
  ModelParams final_estimate;
  Dataset data;
};

/// The adaptation loop: round 1 queries at random, later rounds follow the
/// strategy; after every answer the weights are refit by the regularized
/// MLE (warm-started at the previous estimate).
///
/// The three streams keep comparisons paired: `pool_rng` draws candidate
/// pools, `noise_rng` draws the user's response uniforms, and
/// `strategy_rng` is consumed only by random selection — so both
/// strategies under the same seed see identical worlds and noise.
AdaptationResult run_adaptation(const PreferenceWorld& world, const AdaptationConfig& config,
                                RngStream pool_rng, RngStream noise_rng, RngStream strategy_rng,
                                const CandidatePool* fixed_pool = nullptr);

}  // namespace prefband
