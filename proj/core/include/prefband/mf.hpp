#pragma once

#include "prefband/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace prefband {

/// One raw annotation before ingestion; duplicates per (user,item) are
/// averaged over, matching order-debiased collection.
struct RawPreference {
  int user;
  int item;
  double outcome;
};

struct PreferenceEntry {
  int user;
  int item;
  int outcome;  // binary after ingestion
};

/// Binary preference matrix in sparse triplet form. Ingestion averages
/// duplicate (user,item) annotations into [0,1], re-binarizes at 1/2 and
/// drops exact ties.
class PreferenceData {
 public:
  static PreferenceData from_raw(const std::vector<RawPreference>& raw, int n_users, int n_items);
  /// CSV with header `user_id,item_id,outcome`.
  static PreferenceData from_csv(std::istream& in);

  const std::vector<PreferenceEntry>& entries() const { return entries_; }
  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }
  double density() const;

 private:
  PreferenceData(std::vector<PreferenceEntry> entries, int n_users, int n_items);

  std::vector<PreferenceEntry> entries_;
  int n_users_;
  int n_items_;
};

/// Low-rank logistic model of a binary preference matrix:
/// P = σ(ΛᵀΦ) with user matrix Λ (J×U) and item matrix Φ (J×M).
struct FactorizationModel {
  Matrix user_factors;  // J×U
  Matrix item_factors;  // J×M
  double reg_weight = 0.0;
  double norm_bound = 0.0;  // column-norm cap B; <= 0 means unconstrained

  int rank() const { return static_cast<int>(user_factors.rows()); }
  int n_users() const { return static_cast<int>(user_factors.cols()); }
  int n_items() const { return static_cast<int>(item_factors.cols()); }

  Matrix logits() const { return user_factors.transpose() * item_factors; }
  Matrix probabilities() const;

  std::string to_json_string() const;
  static FactorizationModel from_json_string(const std::string& text);
};

/// Rank-J SVD of the observed matrix (entries centered by −1/2 by default,
/// missing entries imputed as indifference) split symmetrically:
/// Λ = Σ^{1/2}Ũᵀ, Φ = Σ^{1/2}Ṽᵀ.
FactorizationModel svd_init(const PreferenceData& data, int rank, bool centered = true);

struct MfFitConfig {
  double tolerance = 1e-8;  // relative objective change across sweeps
  int max_sweeps = 200;
  int block_iterations = 30;
  bool update_users = true;
  bool update_items = true;

  void validate() const;
};

struct MfFitResult {
  FactorizationModel model;
  std::vector<double> objective_trace;  // objective after each sweep
  int sweeps = 0;
  bool converged = false;
};

/// Σ entries [A log σ(λᵢᵀφⱼ) + (1−A) log(1−σ(λᵢᵀφⱼ))] − (β/2) Σᵢ ‖λᵢ‖².
double mf_objective(const PreferenceData& data, const FactorizationModel& model);

/// Alternating block ascent: users given items, items given users — each
/// block a concave logistic subproblem solved by projected Newton. The
/// objective is monotone across sweeps. L2 regularization applies to user
/// columns only; both factor blocks are kept inside the B-ball by
/// projection.
MfFitResult fit_logistic_mf(const PreferenceData& data, const FactorizationModel& init,
                            double reg_weight, double norm_bound, const MfFitConfig& config = {});

struct MfBoundParams {
  int latent_dim = 1;
  int n_users = 1;
  int n_items = 1;
  double delta = 0.1;
  double const_c = 1.0;
  double min_eig_user_cov = 1.0;  // μ > 0
  double logit_bound = 1.0;       // R
  double logit_buffer = 0.1;      // δ_R

  double alpha() const;  // σ̇(R + δ_R) · μ
  void validate() const;
};

struct MfErrorBound {
  double bound;                 // C √(d(N+M) log(1/δ) / (NM))
  double epsilon;               // uniform-convergence slack, same form
  double contradiction_radius;  // √(4ε/α)
};

MfErrorBound mf_error_bound(const MfBoundParams& params);

/// α = σ̇(R + δ_R) · λ_min(Σᵢ uᵢuᵢᵀ) for the given user columns.
double strong_convexity_certificate(const Matrix& user_factors, double logit_bound,
                                    double logit_buffer);

struct MfMetrics {
  double prob_mean_abs_err = 0.0;
  double prob_max_abs_err = 0.0;
  double max_user_col_norm = 0.0;
  double max_item_col_norm = 0.0;
  std::optional<double> auc;
  std::optional<double> log_loss;
  std::optional<double> mean_item_col_err;
  std::optional<double> max_item_col_err;
};

/// Probability-scale comparison against ground-truth factors; invariant to
/// the ΛᵀR⁻¹RΦ gauge. Per-column item errors are raw (gauge-dependent)
/// diagnostics.
MfMetrics evaluate_mf(const FactorizationModel& model, const FactorizationModel& truth);

/// Held-out classification metrics on observed binary entries.
MfMetrics evaluate_mf(const FactorizationModel& model, const PreferenceData& heldout);

}  // namespace prefband
