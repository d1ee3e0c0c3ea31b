#include "prefband/experiments.hpp"

#include "prefband/logistic.hpp"
#include "prefband/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prefband {

namespace {

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double sample_std(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

void WorldSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("WorldSpec: dim must be >= 1");
  if (norm_bound <= 0.0) throw std::invalid_argument("WorldSpec: norm_bound must be positive");
  if (theta_policy == ThetaPolicy::Fixed) {
    if (theta_fixed.size() != dim) throw std::invalid_argument("WorldSpec: theta_fixed dimension mismatch");
    if (theta_fixed.norm() > norm_bound + 1e-12)
      throw std::invalid_argument("WorldSpec: ‖theta_fixed‖ exceeds norm_bound");
  }
  if (feature_policy == FeaturePolicy::FixedPool && pool_size < 1)
    throw std::invalid_argument("WorldSpec: pool_size must be >= 1");
}

Vector draw_theta_star(const WorldSpec& spec, RngStream& rng) {
  switch (spec.theta_policy) {
    case ThetaPolicy::Fixed: return spec.theta_fixed;
    case ThetaPolicy::Sphere: return spec.norm_bound * rng.unit_sphere(spec.dim);
    case ThetaPolicy::Ball: return rng.ball(spec.dim, spec.norm_bound);
  }
  throw std::logic_error("draw_theta_star: unknown policy");
}

FeatureSource::FeatureSource(const WorldSpec& spec, RngStream& rng) : spec_(spec) {
  if (spec_.feature_policy == FeaturePolicy::FixedPool) {
    pool_.reserve(static_cast<std::size_t>(spec_.pool_size));
    for (int i = 0; i < spec_.pool_size; ++i) pool_.push_back(rng.unit_sphere(spec_.dim));
  }
}

Vector FeatureSource::next(RngStream& rng) {
  switch (spec_.feature_policy) {
    case FeaturePolicy::Sphere:
      return rng.unit_sphere(spec_.dim);
    case FeaturePolicy::FixedPool:
      return pool_[static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(pool_.size())))];
    case FeaturePolicy::BasisCycle: {
      const Vector v = Vector::Unit(spec_.dim, cursor_);
      cursor_ = (cursor_ + 1) % spec_.dim;
      return v;
    }
  }
  throw std::logic_error("FeatureSource: unknown policy");
}

std::string set_kind_name(SetKind kind) {
  switch (kind) {
    case SetKind::Exp: return "exp";
    case SetKind::Nl: return "nl";
    case SetKind::Corollary1: return "corollary1";
  }
  return "unknown";
}

void CoverageConfig::validate() const {
  world.validate();
  if (horizon < 1) throw std::invalid_argument("CoverageConfig: horizon must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("CoverageConfig: delta must lie in (0,1)");
  if (n_trials < 100) throw std::invalid_argument("CoverageConfig: n_trials must be >= 100");
  if (reg_weight <= 0.0) throw std::invalid_argument("CoverageConfig: reg_weight must be positive");
  if (radius_scale < 0.0) throw std::invalid_argument("CoverageConfig: radius_scale must be nonnegative");
  if (self_concordance_const < 1.0)
    throw std::invalid_argument("CoverageConfig: self_concordance_const must be >= 1");
  if (gamma_scale <= 0.0) throw std::invalid_argument("CoverageConfig: gamma_scale must be positive");
  if (jobs < 1) throw std::invalid_argument("CoverageConfig: jobs must be >= 1");
  solver.validate();
}

StreamTrialResult run_stream_trial(const CoverageConfig& config, int trial) {
  const int d = config.world.dim;
  const int horizon = config.horizon;

  RadiusParams rp;
  rp.delta = config.delta;
  rp.dim = d;
  rp.reg_weight = config.reg_weight;
  rp.norm_bound = config.world.norm_bound;
  rp.self_concordance_const = config.self_concordance_const;
  rp.gamma_scale = config.gamma_scale;

  StreamTrialResult out;
  out.rows.reserve(static_cast<std::size_t>(horizon));
  out.covered_at_every_round = true;

  RngStream rng = RngStream::derive(config.world.seed, {101, static_cast<std::uint64_t>(trial)});
  const Vector theta_star_vec = draw_theta_star(config.world, rng);
  const ModelParams theta_star(theta_star_vec, config.world.norm_bound, config.reg_weight);
  FeatureSource features(config.world, rng);

  Dataset data;
  data.reserve(static_cast<std::size_t>(horizon));
  Vector warm = Vector::Zero(d);

  for (int round = 1; round <= horizon; ++round) {
    const Vector x = features.next(rng);
    const int outcome = rng.bernoulli(sigmoid(x.dot(theta_star_vec))) ? 1 : 0;
    data.emplace_back(x, outcome);

    const FitResult fit =
        fit_mle(data, config.reg_weight, config.solver, config.world.norm_bound, warm);
    warm = fit.estimate.theta;
    if (!fit.converged) ++out.solver_failures;

    const HessianMatrix h = hessian(fit.estimate, data);
    const double cor1 = g_gap_statistic(fit.estimate, theta_star, data);

    ExperimentRecord rec;
    rec.experiment = config.label + "_" + set_kind_name(config.set_kind);
    rec.trial = trial;
    rec.round = round;
    rec.strategy = set_kind_name(config.set_kind);
    rec.seed = config.world.seed;
    rec.cor1_stat = cor1;

    switch (config.set_kind) {
      case SetKind::Exp: {
        const ConfidenceEllipsoid set = build_exp_set(fit.estimate, h, rp);
        rec.estimate_error = (fit.estimate.theta - theta_star_vec).norm();
        rec.metric_error = metric_norm(h, fit.estimate.theta - theta_star_vec);
        // 0 × inf would poison the degenerate negative control.
        rec.radius = config.radius_scale == 0.0 ? 0.0 : config.radius_scale * set.radius;
        break;
      }
      case SetKind::Nl: {
        const NlProjectionResult proj =
            project_nl(fit.estimate, data, config.world.norm_bound, config.solver);
        const double gamma = tail_radius(h, rp);
        rec.estimate_error = (proj.point.theta - theta_star_vec).norm();
        rec.metric_error = metric_norm(h, proj.point.theta - theta_star_vec);
        rec.radius = config.radius_scale * (2.0 + 4.0 * config.world.norm_bound) * gamma;
        break;
      }
      case SetKind::Corollary1: {
        const double gamma = tail_radius(h, rp);
        rec.estimate_error = (fit.estimate.theta - theta_star_vec).norm();
        rec.metric_error = cor1;  // the statistic the bound controls
        rec.radius = config.radius_scale * gamma;
        break;
      }
    }
    rec.covered = rec.metric_error <= rec.radius;
    if (!std::isfinite(rec.radius)) ++out.vacuous_radii;
    if (!rec.covered) out.covered_at_every_round = false;
    out.rows.push_back(std::move(rec));
  }
  return out;
}

CoverageSummary run_coverage(const CoverageConfig& config, std::vector<ExperimentRecord>* records) {
  config.validate();
  const int horizon = config.horizon;
  const int n_trials = config.n_trials;

  std::vector<StreamTrialResult> outputs(static_cast<std::size_t>(n_trials));
  parallel_for_index(n_trials, config.jobs,
                     [&](int trial) { outputs[static_cast<std::size_t>(trial)] = run_stream_trial(config, trial); });

  CoverageSummary summary;
  summary.per_round_coverage.assign(static_cast<std::size_t>(horizon), 0.0);
  long anytime = 0;
  for (const StreamTrialResult& out : outputs) {
    summary.solver_failures += out.solver_failures;
    summary.vacuous_radii += out.vacuous_radii;
    for (int r = 0; r < horizon; ++r) {
      if (out.rows[static_cast<std::size_t>(r)].covered)
        summary.per_round_coverage[static_cast<std::size_t>(r)] += 1.0;
    }
    if (out.covered_at_every_round) ++anytime;
    if (records) records->insert(records->end(), out.rows.begin(), out.rows.end());
  }
  for (double& v : summary.per_round_coverage) v /= static_cast<double>(n_trials);

  summary.anytime_coverage = static_cast<double>(anytime) / static_cast<double>(n_trials);
  summary.threshold = 1.0 - config.delta -
                      3.0 * std::sqrt(config.delta * (1.0 - config.delta) /
                                      static_cast<double>(n_trials));
  summary.enforced = config.set_kind != SetKind::Nl;
  summary.pass = summary.enforced ? summary.anytime_coverage >= summary.threshold : true;
  return summary;
}

void ActiveBenchConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("ActiveBenchConfig: dim must be >= 1");
  if (norm_bound <= 0.0) throw std::invalid_argument("ActiveBenchConfig: norm_bound must be positive");
  if (reg_weight <= 0.0) throw std::invalid_argument("ActiveBenchConfig: reg_weight must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ActiveBenchConfig: delta must lie in (0,1)");
  if (pool_size < 1) throw std::invalid_argument("ActiveBenchConfig: pool_size must be >= 1");
  if (horizon < 1) throw std::invalid_argument("ActiveBenchConfig: horizon must be >= 1");
  if (n_seeds < 1) throw std::invalid_argument("ActiveBenchConfig: n_seeds must be >= 1");
  if (efficiency_threshold <= 0.0)
    throw std::invalid_argument("ActiveBenchConfig: efficiency_threshold must be positive");
  if (jobs < 1) throw std::invalid_argument("ActiveBenchConfig: jobs must be >= 1");
  solver.validate();
}

std::vector<ExperimentRecord> adaptation_records(const AdaptationResult& run,
                                                 const PreferenceWorld& world, double reg_weight,
                                                 double delta, const std::string& experiment,
                                                 const std::string& strategy, int trial,
                                                 std::uint64_t seed) {
  RadiusParams rp;
  rp.delta = delta;
  rp.dim = static_cast<int>(world.dim());
  rp.reg_weight = reg_weight;
  rp.norm_bound = world.norm_bound();

  std::vector<ExperimentRecord> rows;
  rows.reserve(run.history.size());
  Dataset prefix;
  prefix.reserve(run.data.size());
  const ModelParams star(world.lambda_star(), world.norm_bound(), reg_weight);

  for (std::size_t t = 0; t < run.history.size(); ++t) {
    prefix.push_back(run.data[t]);
    const ModelParams est(run.estimates[t], world.norm_bound(), reg_weight);
    const HessianMatrix h = hessian(est, prefix);
    const double gamma = tail_radius(h, rp);

    ExperimentRecord rec;
    rec.experiment = experiment;
    rec.trial = trial;
    rec.round = run.history[t].round;
    rec.strategy = strategy;
    rec.estimate_error = run.history[t].estimate_error;
    rec.metric_error = metric_norm(h, est.theta - world.lambda_star());
    rec.radius = zeta_radius(gamma, rp);
    rec.covered = rec.metric_error <= rec.radius;
    rec.cor1_stat = g_gap_statistic(est, star, prefix);
    rec.seed = seed;
    rows.push_back(std::move(rec));
  }
  return rows;
}

namespace {

/// First round (1-based) at which the curve reaches the target error.
int rounds_to_reach(const std::vector<double>& curve, double target) {
  for (std::size_t t = 0; t < curve.size(); ++t) {
    if (curve[t] <= target) return static_cast<int>(t) + 1;
  }
  return static_cast<int>(curve.size());
}

}  // namespace

ActiveBenchSummary run_active_benchmark(const ActiveBenchConfig& config,
                                        std::vector<ExperimentRecord>* records) {
  config.validate();
  const int T = config.horizon;

  struct SeedOutput {
    std::vector<double> err_uncertainty;
    std::vector<double> err_random;
    std::vector<ExperimentRecord> rows;
  };
  std::vector<SeedOutput> outputs(static_cast<std::size_t>(config.n_seeds));

  parallel_for_index(config.n_seeds, config.jobs, [&](int k) {
    SeedOutput& out = outputs[static_cast<std::size_t>(k)];
    const std::uint64_t uk = static_cast<std::uint64_t>(k);

    RngStream world_rng = RngStream::derive(config.seed, {201, uk});
    const PreferenceWorld world(config.norm_bound * world_rng.unit_sphere(config.dim),
                                config.norm_bound);

    AdaptationConfig base;
    base.rounds = T;
    base.reg_weight = config.reg_weight;
    base.norm_bound = config.norm_bound;
    base.delta = config.delta;
    base.pool_policy = config.pool_policy;
    base.pool_size = config.pool_size;
    base.solver = config.solver;

    // Common random numbers: pool and noise streams are re-derived
    // identically for both strategies; only the index stream differs in use.
    for (Strategy strategy : {Strategy::Uncertainty, Strategy::Random}) {
      AdaptationConfig cfg = base;
      cfg.strategy = strategy;
      const AdaptationResult run = run_adaptation(
          world, cfg, RngStream::derive(config.seed, {202, uk}),
          RngStream::derive(config.seed, {203, uk}), RngStream::derive(config.seed, {204, uk}));

      std::vector<double>& errs =
          strategy == Strategy::Uncertainty ? out.err_uncertainty : out.err_random;
      errs.reserve(run.history.size());
      for (const AdaptationRound& r : run.history) errs.push_back(r.estimate_error);
      std::vector<ExperimentRecord> rows =
          adaptation_records(run, world, config.reg_weight, config.delta, "bench_active",
                             strategy_name(strategy), k, config.seed);
      out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
  });

  ActiveBenchSummary summary;
  summary.median_error_uncertainty.resize(static_cast<std::size_t>(T));
  summary.median_error_random.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    std::vector<double> unc;
    std::vector<double> rnd;
    unc.reserve(static_cast<std::size_t>(config.n_seeds));
    rnd.reserve(static_cast<std::size_t>(config.n_seeds));
    for (const SeedOutput& out : outputs) {
      unc.push_back(out.err_uncertainty[static_cast<std::size_t>(t)]);
      rnd.push_back(out.err_random[static_cast<std::size_t>(t)]);
    }
    summary.median_error_uncertainty[static_cast<std::size_t>(t)] = median(std::move(unc));
    summary.median_error_random[static_cast<std::size_t>(t)] = median(std::move(rnd));
  }

  summary.target_error = summary.median_error_random.back();
  summary.rounds_random = rounds_to_reach(summary.median_error_random, summary.target_error);
  summary.rounds_uncertainty =
      rounds_to_reach(summary.median_error_uncertainty, summary.target_error);
  summary.efficiency_ratio = static_cast<double>(summary.rounds_random) /
                             static_cast<double>(summary.rounds_uncertainty);
  summary.threshold = config.efficiency_threshold;
  summary.pass = summary.efficiency_ratio >= summary.threshold;

  if (records) {
    for (const SeedOutput& out : outputs)
      records->insert(records->end(), out.rows.begin(), out.rows.end());
  }
  return summary;
}

void MfScalingConfig::validate() const {
  if (grid.empty()) throw std::invalid_argument("MfScalingConfig: empty grid");
  for (const auto& [n, m] : grid) {
    if (n < 1 || m < 1) throw std::invalid_argument("MfScalingConfig: grid cells must be positive");
    if (rank > std::min(n, m)) throw std::invalid_argument("MfScalingConfig: rank exceeds min cell shape");
  }
  if (rank < 1) throw std::invalid_argument("MfScalingConfig: rank must be >= 1");
  if (n_seeds < 1) throw std::invalid_argument("MfScalingConfig: n_seeds must be >= 1");
  if (norm_bound <= 0.0) throw std::invalid_argument("MfScalingConfig: norm_bound must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("MfScalingConfig: delta must lie in (0,1)");
  if (reg_weight < 0.0) throw std::invalid_argument("MfScalingConfig: reg_weight must be nonnegative");
  if (mu_min <= 0.0) throw std::invalid_argument("MfScalingConfig: mu_min must be positive");
  if (resample_cap < 1) throw std::invalid_argument("MfScalingConfig: resample_cap must be >= 1");
  if (jobs < 1) throw std::invalid_argument("MfScalingConfig: jobs must be >= 1");
  fit.validate();
}

namespace {

struct MfTruth {
  FactorizationModel model;
  double min_eig = 0.0;
  double max_abs_logit = 0.0;
};

MfTruth draw_mf_truth(int rank, int n_users, int n_items, double norm_bound, double mu_min,
                      int resample_cap, RngStream& rng) {
  for (int attempt = 0; attempt < resample_cap; ++attempt) {
    Matrix users(rank, n_users);
    for (int u = 0; u < n_users; ++u) users.col(u) = rng.ball(rank, norm_bound);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(users * users.transpose(), Eigen::EigenvaluesOnly);
    const double min_eig = std::max(0.0, eig.eigenvalues().minCoeff());
    if (min_eig < mu_min) continue;

    Matrix items(rank, n_items);
    for (int m = 0; m < n_items; ++m) items.col(m) = rng.ball(rank, norm_bound);

    MfTruth truth;
    truth.model.user_factors = std::move(users);
    truth.model.item_factors = std::move(items);
    truth.model.reg_weight = 0.0;
    truth.model.norm_bound = norm_bound;
    truth.min_eig = min_eig;
    truth.max_abs_logit = truth.model.logits().cwiseAbs().maxCoeff();
    return truth;
  }
  throw std::runtime_error("draw_mf_truth: user-covariance floor unmet within resample cap");
}

PreferenceData sample_matrix(const FactorizationModel& truth, double density, RngStream& rng) {
  const Matrix p = truth.probabilities();
  std::vector<RawPreference> raw;
  raw.reserve(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      const bool keep = density >= 1.0 || rng.uniform() < density;
      const double outcome = rng.bernoulli(p(i, j)) ? 1.0 : 0.0;  // draw even if masked
      if (keep) raw.push_back({i, j, outcome});
    }
  }
  return PreferenceData::from_raw(raw, static_cast<int>(p.rows()), static_cast<int>(p.cols()));
}

}  // namespace

MfScalingSummary run_mf_scaling(const MfScalingConfig& config,
                                std::vector<ExperimentRecord>* records) {
  config.validate();
  const int cells = static_cast<int>(config.grid.size());
  const int total = cells * config.n_seeds;

  struct CellSeedOutput {
    double mean_err = 0.0;
    double max_err = 0.0;
    double bound = 0.0;
    double fitted_c = 0.0;
  };
  std::vector<CellSeedOutput> outputs(static_cast<std::size_t>(total));

  parallel_for_index(total, config.jobs, [&](int idx) {
    const int cell = idx / config.n_seeds;
    const int k = idx % config.n_seeds;
    const auto [n_users, n_items] = config.grid[static_cast<std::size_t>(cell)];

    RngStream rng = RngStream::derive(config.seed,
                                      {301, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(k)});
    const MfTruth truth = draw_mf_truth(config.rank, n_users, n_items, config.norm_bound,
                                        config.mu_min, config.resample_cap, rng);
    const PreferenceData data = sample_matrix(truth.model, 1.0, rng);

    const FactorizationModel init = svd_init(data, config.rank);
    const MfFitResult fit =
        fit_logistic_mf(data, init, config.reg_weight, config.norm_bound, config.fit);
    const MfMetrics metrics = evaluate_mf(fit.model, truth.model);

    MfBoundParams bp;
    bp.latent_dim = config.rank;
    bp.n_users = n_users;
    bp.n_items = n_items;
    bp.delta = config.delta;
    bp.const_c = 1.0;
    bp.min_eig_user_cov = truth.min_eig;
    bp.logit_bound = std::max(1e-6, truth.max_abs_logit);
    bp.logit_buffer = 0.1;

    CellSeedOutput& out = outputs[static_cast<std::size_t>(idx)];
    out.mean_err = metrics.prob_mean_abs_err;
    out.max_err = metrics.prob_max_abs_err;
    out.bound = mf_error_bound(bp).bound;
    out.fitted_c = metrics.prob_mean_abs_err /
                   std::sqrt(static_cast<double>(config.rank) * (n_users + n_items) *
                             std::log(1.0 / config.delta) /
                             (static_cast<double>(n_users) * static_cast<double>(n_items)));
  });

  MfScalingSummary summary;
  summary.median_errors.reserve(static_cast<std::size_t>(cells));
  summary.fitted_c.reserve(static_cast<std::size_t>(cells));

  for (int cell = 0; cell < cells; ++cell) {
    std::vector<double> errs;
    std::vector<double> cs;
    for (int k = 0; k < config.n_seeds; ++k) {
      const CellSeedOutput& out = outputs[static_cast<std::size_t>(cell * config.n_seeds + k)];
      errs.push_back(out.mean_err);
      cs.push_back(out.fitted_c);
      if (records) {
        ExperimentRecord rec;
        rec.experiment = "mf_scaling";
        rec.trial = k;
        rec.round = cell;
        rec.strategy = "mf";
        rec.estimate_error = out.mean_err;
        rec.metric_error = out.max_err;
        rec.radius = out.bound;
        rec.covered = rec.metric_error <= rec.radius;
        rec.cor1_stat = out.fitted_c;
        rec.seed = config.seed;
        records->push_back(std::move(rec));
      }
    }
    summary.median_errors.push_back(median(errs));
    summary.fitted_c.push_back(median(cs));
  }

  summary.monotone = true;
  for (int cell = 1; cell < cells; ++cell) {
    if (!(summary.median_errors[static_cast<std::size_t>(cell)] <
          summary.median_errors[static_cast<std::size_t>(cell - 1)]))
      summary.monotone = false;
  }

  // Least-squares slope of log(err) against log(NM/(N+M)).
  if (cells >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int cell = 0; cell < cells; ++cell) {
      const auto [n_users, n_items] = config.grid[static_cast<std::size_t>(cell)];
      const double x = std::log(static_cast<double>(n_users) * n_items / (n_users + n_items));
      const double y = std::log(summary.median_errors[static_cast<std::size_t>(cell)]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(cells);
    summary.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  summary.slope_ok = summary.slope >= config.slope_lo && summary.slope <= config.slope_hi;

  double c_min = summary.fitted_c.front();
  double c_max = summary.fitted_c.front();
  for (double c : summary.fitted_c) {
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
  }
  summary.c_spread = c_max / c_min;
  summary.pass = summary.monotone && summary.slope_ok && summary.c_spread <= config.c_spread_max;
  return summary;
}

void MfInitStabilityConfig::validate() const {
  if (n_users < 1 || n_items < 1) throw std::invalid_argument("MfInitStabilityConfig: shape must be positive");
  if (rank < 1 || rank > std::min(n_users, n_items))
    throw std::invalid_argument("MfInitStabilityConfig: bad rank");
  if (n_seeds < 2) throw std::invalid_argument("MfInitStabilityConfig: n_seeds must be >= 2");
  if (norm_bound <= 0.0) throw std::invalid_argument("MfInitStabilityConfig: norm_bound must be positive");
  if (reg_weight < 0.0) throw std::invalid_argument("MfInitStabilityConfig: reg_weight must be nonnegative");
  if (mu_min <= 0.0) throw std::invalid_argument("MfInitStabilityConfig: mu_min must be positive");
  if (!(mask_density > 0.0 && mask_density <= 1.0))
    throw std::invalid_argument("MfInitStabilityConfig: mask_density must lie in (0,1]");
  if (resample_cap < 1) throw std::invalid_argument("MfInitStabilityConfig: resample_cap must be >= 1");
  if (jobs < 1) throw std::invalid_argument("MfInitStabilityConfig: jobs must be >= 1");
  fit.validate();
}

MfInitStabilitySummary run_mf_init_stability(const MfInitStabilityConfig& config,
                                             std::vector<ExperimentRecord>* records) {
  config.validate();

  RngStream truth_rng = RngStream::derive(config.seed, {401});
  const MfTruth truth = draw_mf_truth(config.rank, config.n_users, config.n_items,
                                      config.norm_bound, config.mu_min, config.resample_cap,
                                      truth_rng);

  MfInitStabilitySummary summary;
  summary.svd_log_loss.resize(static_cast<std::size_t>(config.n_seeds));
  summary.random_log_loss.resize(static_cast<std::size_t>(config.n_seeds));

  parallel_for_index(config.n_seeds, config.jobs, [&](int k) {
    RngStream rng = RngStream::derive(config.seed, {402, static_cast<std::uint64_t>(k)});
    const PreferenceData train = sample_matrix(truth.model, config.mask_density, rng);
    const PreferenceData eval = sample_matrix(truth.model, 1.0, rng);

    const MfFitResult svd_fit = fit_logistic_mf(train, svd_init(train, config.rank),
                                                config.reg_weight, config.norm_bound, config.fit);
    summary.svd_log_loss[static_cast<std::size_t>(k)] = *evaluate_mf(svd_fit.model, eval).log_loss;

    FactorizationModel random_init;
    random_init.user_factors = Matrix(config.rank, config.n_users);
    random_init.item_factors = Matrix(config.rank, config.n_items);
    for (int u = 0; u < config.n_users; ++u)
      random_init.user_factors.col(u) = rng.ball(config.rank, config.norm_bound);
    for (int m = 0; m < config.n_items; ++m)
      random_init.item_factors.col(m) = rng.ball(config.rank, config.norm_bound);

    const MfFitResult rnd_fit =
        fit_logistic_mf(train, random_init, config.reg_weight, config.norm_bound, config.fit);
    summary.random_log_loss[static_cast<std::size_t>(k)] = *evaluate_mf(rnd_fit.model, eval).log_loss;
  });

  if (records) {
    for (int k = 0; k < config.n_seeds; ++k) {
      for (int variant = 0; variant < 2; ++variant) {
        ExperimentRecord rec;
        rec.experiment = "mf_init_stability";
        rec.trial = k;
        rec.round = 1;
        rec.strategy = variant == 0 ? "svd_init" : "random_init";
        rec.estimate_error = variant == 0 ? summary.svd_log_loss[static_cast<std::size_t>(k)]
                                          : summary.random_log_loss[static_cast<std::size_t>(k)];
        rec.metric_error = rec.estimate_error;
        rec.radius = std::numeric_limits<double>::infinity();
        rec.covered = true;
        rec.cor1_stat = 0.0;
        rec.seed = config.seed;
        records->push_back(std::move(rec));
      }
    }
  }

  summary.svd_std = sample_std(summary.svd_log_loss);
  summary.random_std = sample_std(summary.random_log_loss);
  summary.pass = summary.svd_std <= summary.random_std;
  return summary;
}

}  // namespace prefband
