#include "prefband/experiments.hpp"
#include "prefband/logistic.hpp"
#include "prefband/martingale.hpp"
#include "prefband/mf.hpp"
#include "prefband/records.hpp"
#include "prefband/selection.hpp"
#include "prefband/solver.hpp"

#include "config_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace prefband::cli {
namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t parsed) {
  if (opt != nullptr && opt->count() > 0) return parsed;  // flag or config file
  if (const char* env = std::getenv("PREFBAND_SEED")) {
    return std::stoull(std::string(env));
  }
  return parsed;
}

void sort_records(std::vector<ExperimentRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const ExperimentRecord& a, const ExperimentRecord& b) {
                     if (a.experiment != b.experiment) return a.experiment < b.experiment;
                     if (a.trial != b.trial) return a.trial < b.trial;
                     if (a.round != b.round) return a.round < b.round;
                     return a.strategy < b.strategy;
                   });
}

void write_outputs(const fs::path& out_dir, const std::vector<ExperimentRecord>& records,
                   const json& summary, const json& resolved) {
  fs::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "records.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (out_dir / "records.csv").string());
    write_records_csv(csv, records);
  }
  {
    std::ofstream js(out_dir / "summary.json", std::ios::binary);
    js << summary.dump(2) << '\n';
  }
  {
    std::ofstream js(out_dir / "config.resolved.json", std::ios::binary);
    js << resolved.dump(2) << '\n';
  }
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);  // "inf"/"nan" survive JSON round-trips as text
}

// ---------------------------------------------------------------------------
// coverage

struct CoverageCli {
  int d = 3;
  double norm_bound = 1.0;
  double reg_weight = 1.0;
  double delta = 0.1;
  int horizon = 200;
  int trials = 500;
  std::string set_kind = "exp";
  std::string theta_policy = "sphere";
  std::string feature_policy = "sphere";
  int pool_size = 100;
  double c = 1.0;
  double gamma_scale = 1.0;
  double radius_scale = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out = "runs/coverage";
  std::string config;
};

int run_coverage_cmd(const CoverageCli& cli, std::uint64_t seed) {
  CoverageConfig config;
  config.world.dim = cli.d;
  config.world.norm_bound = cli.norm_bound;
  config.world.seed = seed;
  config.world.pool_size = cli.pool_size;
  if (cli.theta_policy == "sphere") config.world.theta_policy = ThetaPolicy::Sphere;
  else if (cli.theta_policy == "ball") config.world.theta_policy = ThetaPolicy::Ball;
  else throw std::invalid_argument("coverage: unknown theta policy '" + cli.theta_policy + "'");
  if (cli.feature_policy == "sphere") config.world.feature_policy = FeaturePolicy::Sphere;
  else if (cli.feature_policy == "pool") config.world.feature_policy = FeaturePolicy::FixedPool;
  else if (cli.feature_policy == "basis") config.world.feature_policy = FeaturePolicy::BasisCycle;
  else throw std::invalid_argument("coverage: unknown feature policy '" + cli.feature_policy + "'");
  if (cli.set_kind == "exp") config.set_kind = SetKind::Exp;
  else if (cli.set_kind == "nl") config.set_kind = SetKind::Nl;
  else if (cli.set_kind == "corollary1") config.set_kind = SetKind::Corollary1;
  else throw std::invalid_argument("coverage: unknown set kind '" + cli.set_kind + "'");
  config.horizon = cli.horizon;
  config.delta = cli.delta;
  config.n_trials = cli.trials;
  config.reg_weight = cli.reg_weight;
  config.self_concordance_const = cli.c;
  config.gamma_scale = cli.gamma_scale;
  config.radius_scale = cli.radius_scale;
  config.jobs = cli.jobs;
  config.validate();

  std::vector<ExperimentRecord> records;
  const CoverageSummary summary = run_coverage(config, &records);
  sort_records(records);

  json s;
  s["experiment"] = "coverage";
  s["set_kind"] = cli.set_kind;
  s["anytime_coverage"] = summary.anytime_coverage;
  s["threshold"] = summary.threshold;
  s["enforced"] = summary.enforced;
  s["pass"] = summary.pass;
  s["solver_failures"] = summary.solver_failures;
  s["vacuous_radii"] = summary.vacuous_radii;
  s["per_round_coverage"] = summary.per_round_coverage;
  s["n_trials"] = config.n_trials;
  s["horizon"] = config.horizon;
  s["delta"] = config.delta;
  s["seed"] = seed;
  if (!summary.enforced)
    s["note"] = "nl coverage is measured and reported only; expected near 1 - delta";

  json r;
  r["command"] = "coverage";
  r["d"] = cli.d;
  r["S"] = cli.norm_bound;
  r["lambda"] = cli.reg_weight;
  r["delta"] = cli.delta;
  r["horizon"] = cli.horizon;
  r["trials"] = cli.trials;
  r["set-kind"] = cli.set_kind;
  r["theta-policy"] = cli.theta_policy;
  r["feature-policy"] = cli.feature_policy;
  r["pool-size"] = cli.pool_size;
  r["c"] = cli.c;
  r["gamma-scale"] = cli.gamma_scale;
  r["radius-scale"] = cli.radius_scale;
  r["seed"] = seed;
  r["jobs"] = cli.jobs;
  r["out"] = cli.out;

  write_outputs(cli.out, records, s, r);
  return summary.pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// verify supermartingale / theorem

struct VerifyCli {
  int d = 2;
  int horizon = 50;
  int replicates = 10000;
  int n_xi = 8;
  double reg_weight = 1.0;
  double norm_bound = 1.0;
  double kappa = 2.0;
  double delta = 0.1;
  int trials = 500;
  std::string weight_mode = "estimate";
  double radius_scale = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  std::string config;
};

MartingaleConfig to_martingale_config(const VerifyCli& cli, std::uint64_t seed) {
  MartingaleConfig config;
  config.dim = cli.d;
  config.horizon = cli.horizon;
  config.replicates = cli.replicates;
  config.n_xi = cli.n_xi;
  config.reg_weight = cli.reg_weight;
  config.norm_bound = cli.norm_bound;
  config.kappa = cli.kappa;
  config.delta = cli.delta;
  config.n_trajectories = cli.trials;
  config.radius_scale = cli.radius_scale;
  config.seed = seed;
  config.jobs = cli.jobs;
  if (cli.weight_mode == "true") config.weight_mode = WeightMode::TrueProbability;
  else if (cli.weight_mode == "estimate") config.weight_mode = WeightMode::Estimate;
  else if (cli.weight_mode == "one") config.weight_mode = WeightMode::One;
  else if (cli.weight_mode == "zero") config.weight_mode = WeightMode::Zero;
  else throw std::invalid_argument("verify: unknown weight mode '" + cli.weight_mode + "'");
  return config;
}

json report_to_json(const CheckReport& report) {
  json j;
  j["check_name"] = report.check_name;
  j["statistic"] = finite_or_string(report.statistic);
  j["threshold"] = report.threshold;
  j["pass"] = report.pass;
  j["n_replicates"] = report.n_replicates;
  j["seed"] = report.seed;
  return j;
}

json verify_resolved(const VerifyCli& cli, const char* command, std::uint64_t seed) {
  json r;
  r["command"] = command;
  r["d"] = cli.d;
  r["horizon"] = cli.horizon;
  r["replicates"] = cli.replicates;
  r["n-xi"] = cli.n_xi;
  r["lambda"] = cli.reg_weight;
  r["S"] = cli.norm_bound;
  r["kappa"] = cli.kappa;
  r["delta"] = cli.delta;
  r["trials"] = cli.trials;
  r["weight-mode"] = cli.weight_mode;
  r["radius-scale"] = cli.radius_scale;
  r["seed"] = seed;
  r["jobs"] = cli.jobs;
  r["out"] = cli.out;
  return r;
}

int run_verify_supermartingale(const VerifyCli& cli, std::uint64_t seed) {
  const MartingaleConfig config = to_martingale_config(cli, seed);
  const CheckReport mgf = mgf_two_point_check(config.kappa);
  const CheckReport sm = verify_supermartingale(config);

  const bool gate_on_mgf = config.weight_mode == WeightMode::TrueProbability ||
                           config.weight_mode == WeightMode::Estimate;
  const bool pass = sm.pass && (!gate_on_mgf || mgf.pass);

  json s;
  s["experiment"] = "verify_supermartingale";
  s["reports"] = json::array({report_to_json(mgf), report_to_json(sm)});
  s["pass"] = pass;
  s["seed"] = seed;

  write_outputs(cli.out.empty() ? "runs/verify-supermartingale" : cli.out, {}, s,
                verify_resolved(cli, "verify supermartingale", seed));
  return pass ? kExitPass : kExitFail;
}

int run_verify_theorem(const VerifyCli& cli, std::uint64_t seed) {
  const MartingaleConfig config = to_martingale_config(cli, seed);
  const CheckReport report = verify_theorem_bound(config);

  json s;
  s["experiment"] = "verify_theorem";
  s["reports"] = json::array({report_to_json(report)});
  s["pass"] = report.pass;
  s["seed"] = seed;

  write_outputs(cli.out.empty() ? "runs/verify-theorem" : cli.out, {}, s,
                verify_resolved(cli, "verify theorem", seed));
  return report.pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// adapt / bench-active

struct AdaptCli {
  int d = 8;
  double norm_bound = 2.5;
  double reg_weight = 1.0;
  double delta = 0.1;
  int rounds = 40;
  int pool_size = 100;
  std::string pool_policy = "fresh";
  std::string strategy = "uncertainty";
  std::uint64_t seed = 0;
  std::string out = "runs/adapt";
  std::string config;
};

PoolPolicy parse_pool_policy(const std::string& name) {
  if (name == "fixed") return PoolPolicy::FixedPool;
  if (name == "fresh") return PoolPolicy::FreshPool;
  if (name == "direction") return PoolPolicy::OptimalDirection;
  throw std::invalid_argument("unknown pool policy '" + name + "'");
}

int run_adapt_cmd(const AdaptCli& cli, std::uint64_t seed) {
  AdaptationConfig config;
  config.rounds = cli.rounds;
  config.reg_weight = cli.reg_weight;
  config.norm_bound = cli.norm_bound;
  config.delta = cli.delta;
  config.pool_policy = parse_pool_policy(cli.pool_policy);
  config.pool_size = cli.pool_size;
  if (cli.strategy == "uncertainty") config.strategy = Strategy::Uncertainty;
  else if (cli.strategy == "random") config.strategy = Strategy::Random;
  else throw std::invalid_argument("adapt: unknown strategy '" + cli.strategy + "'");
  config.validate();

  RngStream world_rng = RngStream::derive(seed, {201, 0});
  const PreferenceWorld world(cli.norm_bound * world_rng.unit_sphere(cli.d), cli.norm_bound);

  RngStream pool_rng = RngStream::derive(seed, {202, 0});
  std::unique_ptr<CandidatePool> fixed;
  if (config.pool_policy == PoolPolicy::FixedPool) {
    std::vector<Vector> cands;
    cands.reserve(static_cast<std::size_t>(cli.pool_size));
    for (int i = 0; i < cli.pool_size; ++i) cands.push_back(pool_rng.unit_sphere(cli.d));
    fixed = std::make_unique<CandidatePool>(std::move(cands));
  }

  const AdaptationResult run =
      run_adaptation(world, config, RngStream::derive(seed, {202, 0}),
                     RngStream::derive(seed, {203, 0}), RngStream::derive(seed, {204, 0}),
                     fixed.get());

  std::vector<ExperimentRecord> records = adaptation_records(
      run, world, cli.reg_weight, cli.delta, "adapt", strategy_name(config.strategy), 0, seed);
  sort_records(records);

  long failures = 0;
  for (const AdaptationRound& r : run.history)
    if (!r.solver_converged) ++failures;

  json s;
  s["experiment"] = "adapt";
  s["strategy"] = cli.strategy;
  s["final_error"] = run.history.back().estimate_error;
  s["rounds"] = cli.rounds;
  s["solver_failures"] = failures;
  s["pass"] = true;
  s["seed"] = seed;

  json r;
  r["command"] = "adapt";
  r["d"] = cli.d;
  r["S"] = cli.norm_bound;
  r["lambda"] = cli.reg_weight;
  r["delta"] = cli.delta;
  r["rounds"] = cli.rounds;
  r["pool-size"] = cli.pool_size;
  r["pool-policy"] = cli.pool_policy;
  r["strategy"] = cli.strategy;
  r["seed"] = seed;
  r["out"] = cli.out;

  write_outputs(cli.out, records, s, r);
  return kExitPass;
}

struct BenchCli {
  int d = 8;
  double norm_bound = 2.5;
  double reg_weight = 1.0;
  double delta = 0.1;
  int pool_size = 100;
  int horizon = 60;
  int seeds = 20;
  double threshold = 1.3;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out = "runs/bench-active";
  std::string config;
};

int run_bench_cmd(const BenchCli& cli, std::uint64_t seed) {
  ActiveBenchConfig config;
  config.dim = cli.d;
  config.norm_bound = cli.norm_bound;
  config.reg_weight = cli.reg_weight;
  config.delta = cli.delta;
  config.pool_size = cli.pool_size;
  config.horizon = cli.horizon;
  config.n_seeds = cli.seeds;
  config.efficiency_threshold = cli.threshold;
  config.seed = seed;
  config.jobs = cli.jobs;
  config.validate();

  std::vector<ExperimentRecord> records;
  const ActiveBenchSummary summary = run_active_benchmark(config, &records);
  sort_records(records);

  json s;
  s["experiment"] = "bench_active";
  s["efficiency_ratio"] = summary.efficiency_ratio;
  s["target_error"] = summary.target_error;
  s["rounds_random"] = summary.rounds_random;
  s["rounds_uncertainty"] = summary.rounds_uncertainty;
  s["threshold"] = summary.threshold;
  s["pass"] = summary.pass;
  s["median_error_uncertainty"] = summary.median_error_uncertainty;
  s["median_error_random"] = summary.median_error_random;
  s["seed"] = seed;

  json r;
  r["command"] = "bench-active";
  r["d"] = cli.d;
  r["S"] = cli.norm_bound;
  r["lambda"] = cli.reg_weight;
  r["delta"] = cli.delta;
  r["pool-size"] = cli.pool_size;
  r["horizon"] = cli.horizon;
  r["seeds"] = cli.seeds;
  r["efficiency-threshold"] = cli.threshold;
  r["seed"] = seed;
  r["jobs"] = cli.jobs;
  r["out"] = cli.out;

  write_outputs(cli.out, records, s, r);
  return summary.pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// mf-train / mf-scaling

struct MfTrainCli {
  std::string data;
  std::string heldout;
  int rank = 3;
  double reg_weight = 0.05;
  double norm_bound = 1.5;
  double tolerance = 1e-8;
  int max_sweeps = 200;
  bool raw_svd = false;  // disable the −1/2 centering before the init SVD
  std::uint64_t seed = 0;
  std::string out = "runs/mf-train";
  std::string config;
};

int run_mf_train_cmd(const MfTrainCli& cli, std::uint64_t seed) {
  std::ifstream in(cli.data);
  if (!in) throw std::invalid_argument("mf-train: cannot read data file '" + cli.data + "'");
  const PreferenceData data = PreferenceData::from_csv(in);

  MfFitConfig fit_config;
  fit_config.tolerance = cli.tolerance;
  fit_config.max_sweeps = cli.max_sweeps;
  fit_config.validate();

  const FactorizationModel init = svd_init(data, cli.rank, !cli.raw_svd);
  const MfFitResult fit = fit_logistic_mf(data, init, cli.reg_weight, cli.norm_bound, fit_config);

  json s;
  s["experiment"] = "mf_train";
  s["n_users"] = data.n_users();
  s["n_items"] = data.n_items();
  s["density"] = data.density();
  s["rank"] = cli.rank;
  s["sweeps"] = fit.sweeps;
  s["converged"] = fit.converged;
  s["objective"] = fit.objective_trace.back();
  s["pass"] = fit.converged;
  s["seed"] = seed;

  if (!cli.heldout.empty()) {
    std::ifstream held_in(cli.heldout);
    if (!held_in) throw std::invalid_argument("mf-train: cannot read held-out file");
    const MfMetrics metrics = evaluate_mf(fit.model, PreferenceData::from_csv(held_in));
    if (metrics.auc) s["heldout_auc"] = *metrics.auc;
    if (metrics.log_loss) s["heldout_log_loss"] = *metrics.log_loss;
  }

  json r;
  r["command"] = "mf-train";
  r["data"] = cli.data;
  r["heldout"] = cli.heldout;
  r["rank"] = cli.rank;
  r["beta"] = cli.reg_weight;
  r["B"] = cli.norm_bound;
  r["tol"] = cli.tolerance;
  r["max-sweeps"] = cli.max_sweeps;
  r["raw-svd"] = cli.raw_svd;
  r["seed"] = seed;
  r["out"] = cli.out;

  write_outputs(cli.out, {}, s, r);
  std::ofstream model_out(fs::path(cli.out) / "model.json", std::ios::binary);
  model_out << fit.model.to_json_string() << '\n';
  return fit.converged ? kExitPass : kExitFail;
}

struct MfScalingCli {
  std::string grid = "25x100,50x200,100x400";
  int rank = 3;
  int seeds = 10;
  double norm_bound = 1.5;
  double delta = 0.1;
  double reg_weight = 0.05;
  double mu_min = 1.0;
  bool init_stability = false;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out = "runs/mf-scaling";
  std::string config;
};

std::vector<std::pair<int, int>> parse_grid(const std::string& text) {
  std::vector<std::pair<int, int>> grid;
  std::istringstream cells(text);
  std::string cell;
  while (std::getline(cells, cell, ',')) {
    const auto x = cell.find('x');
    if (x == std::string::npos) throw std::invalid_argument("mf-scaling: grid cell needs NxM: " + cell);
    grid.emplace_back(std::stoi(cell.substr(0, x)), std::stoi(cell.substr(x + 1)));
  }
  if (grid.empty()) throw std::invalid_argument("mf-scaling: empty grid");
  return grid;
}

int run_mf_scaling_cmd(const MfScalingCli& cli, std::uint64_t seed) {
  MfScalingConfig config;
  config.grid = parse_grid(cli.grid);
  config.rank = cli.rank;
  config.n_seeds = cli.seeds;
  config.norm_bound = cli.norm_bound;
  config.delta = cli.delta;
  config.reg_weight = cli.reg_weight;
  config.mu_min = cli.mu_min;
  config.seed = seed;
  config.jobs = cli.jobs;
  config.validate();

  std::vector<ExperimentRecord> records;
  const MfScalingSummary summary = run_mf_scaling(config, &records);

  json s;
  s["experiment"] = "mf_scaling";
  s["median_errors"] = summary.median_errors;
  s["fitted_c"] = summary.fitted_c;
  s["slope"] = summary.slope;
  s["monotone"] = summary.monotone;
  s["slope_ok"] = summary.slope_ok;
  s["c_spread"] = summary.c_spread;
  s["seed"] = seed;

  bool pass = summary.pass;
  if (cli.init_stability) {
    // Runs with its own tuned instance (sharp sparse preferences, fixed
    // sweep budget); only the seed and job budget carry over.
    MfInitStabilityConfig stability;
    stability.seed = seed;
    stability.jobs = cli.jobs;
    stability.validate();
    const MfInitStabilitySummary st = run_mf_init_stability(stability, &records);
    s["init_stability"] = {{"svd_std", st.svd_std},
                           {"random_std", st.random_std},
                           {"pass", st.pass}};
    pass = pass && st.pass;
  }
  s["pass"] = pass;
  sort_records(records);

  json r;
  r["command"] = "mf-scaling";
  r["grid"] = cli.grid;
  r["rank"] = cli.rank;
  r["seeds"] = cli.seeds;
  r["B"] = cli.norm_bound;
  r["delta"] = cli.delta;
  r["beta"] = cli.reg_weight;
  r["mu-min"] = cli.mu_min;
  r["init-stability"] = cli.init_stability;
  r["seed"] = seed;
  r["jobs"] = cli.jobs;
  r["out"] = cli.out;

  write_outputs(cli.out, records, s, r);
  return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// mle-fit

struct MleFitCli {
  std::string data;
  int d = 3;
  double norm_bound = 1.0;
  double reg_weight = 1.0;
  double delta = 0.1;
  int horizon = 100;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  std::string out = "runs/mle-fit";
  std::string config;
};

Dataset read_observation_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("mle-fit: empty data file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) header.push_back(field);
  }
  if (header.size() < 2 || header.back() != "outcome")
    throw std::invalid_argument("mle-fit: expected header x1,...,xd,outcome");
  const std::size_t d = header.size() - 1;

  Dataset data;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    Vector x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::getline(row, field, ',')) throw std::invalid_argument("mle-fit: short row");
      x[static_cast<Eigen::Index>(i)] = std::stod(field);
    }
    if (!std::getline(row, field, ',')) throw std::invalid_argument("mle-fit: missing outcome");
    data.emplace_back(std::move(x), std::stoi(field));
  }
  if (data.empty()) throw std::invalid_argument("mle-fit: no rows");
  return data;
}

int run_mle_fit_cmd(const MleFitCli& cli, std::uint64_t seed) {
  SolverConfig solver;
  solver.tolerance = cli.tolerance;
  solver.validate();

  json s;
  s["experiment"] = "mle_fit";
  s["seed"] = seed;
  std::vector<ExperimentRecord> records;

  if (!cli.data.empty()) {
    std::ifstream in(cli.data);
    if (!in) throw std::invalid_argument("mle-fit: cannot read data file '" + cli.data + "'");
    const Dataset data = read_observation_csv(in);
    const FitResult fit = fit_mle(data, cli.reg_weight, solver, cli.norm_bound);

    s["n"] = data.size();
    s["converged"] = fit.converged;
    s["iterations"] = fit.iterations;
    s["final_gradient_norm"] = fit.final_gradient_norm;
    s["log_likelihood"] = fit.objective_trace.back();
    s["estimate"] = std::vector<double>(fit.estimate.theta.data(),
                                        fit.estimate.theta.data() + fit.estimate.theta.size());
    s["pass"] = fit.converged;

    json r;
    r["command"] = "mle-fit";
    r["data"] = cli.data;
    r["lambda"] = cli.reg_weight;
    r["S"] = cli.norm_bound;
    r["tol"] = cli.tolerance;
    r["seed"] = seed;
    r["out"] = cli.out;
    write_outputs(cli.out, records, s, r);
    return fit.converged ? kExitPass : kExitFail;
  }

  // Synthetic mode: one simulated stream, refit each round, report the
  // tail statistic against its radius.
  CoverageConfig config;
  config.world.dim = cli.d;
  config.world.norm_bound = cli.norm_bound;
  config.world.seed = seed;
  config.horizon = cli.horizon;
  config.delta = cli.delta;
  config.set_kind = SetKind::Corollary1;
  config.reg_weight = cli.reg_weight;
  config.solver = solver;
  config.label = "mle_fit";
  config.world.validate();
  solver.validate();
  if (!(cli.delta > 0.0 && cli.delta < 1.0))
    throw std::invalid_argument("mle-fit: delta must lie in (0,1)");
  if (cli.horizon < 1) throw std::invalid_argument("mle-fit: horizon must be >= 1");

  const StreamTrialResult stream = run_stream_trial(config, 0);
  records = stream.rows;
  sort_records(records);
  s["anytime_covered"] = stream.covered_at_every_round;
  s["solver_failures"] = stream.solver_failures;
  s["final_estimate_error"] = records.back().estimate_error;
  s["pass"] = stream.solver_failures == 0;

  json r;
  r["command"] = "mle-fit";
  r["data"] = "";
  r["d"] = cli.d;
  r["S"] = cli.norm_bound;
  r["lambda"] = cli.reg_weight;
  r["delta"] = cli.delta;
  r["horizon"] = cli.horizon;
  r["tol"] = cli.tolerance;
  r["seed"] = seed;
  r["out"] = cli.out;
  write_outputs(cli.out, records, s, r);
  return stream.solver_failures == 0 ? kExitPass : kExitFail;
}

}  // namespace
}  // namespace prefband::cli

int main(int argc, char** argv) {
  using namespace prefband::cli;

  CLI::App app{"prefband: online preference estimation with logistic models - "
               "regularized MLE, anytime confidence ellipsoids, uncertainty-guided "
               "query selection, and logistic matrix factorization"};
  app.require_subcommand(1);

  CoverageCli coverage;
  VerifyCli verify;
  AdaptCli adapt;
  BenchCli bench;
  MfTrainCli mf_train;
  MfScalingCli mf_scaling;
  MleFitCli mle_fit;

  auto* cov_cmd = app.add_subcommand("coverage", "Monte Carlo confidence-set coverage");
  cov_cmd->add_option("--d", coverage.d, "Dimension");
  cov_cmd->add_option("--S", coverage.norm_bound, "Parameter ball radius");
  cov_cmd->add_option("--lambda", coverage.reg_weight, "Regularization weight");
  cov_cmd->add_option("--delta", coverage.delta, "Confidence parameter");
  cov_cmd->add_option("--horizon", coverage.horizon, "Rounds per trial");
  cov_cmd->add_option("--trials", coverage.trials, "Monte Carlo trials");
  cov_cmd->add_option("--set-kind", coverage.set_kind, "exp | nl | corollary1");
  cov_cmd->add_option("--theta-policy", coverage.theta_policy, "sphere | ball");
  cov_cmd->add_option("--feature-policy", coverage.feature_policy, "sphere | pool | basis");
  cov_cmd->add_option("--pool-size", coverage.pool_size, "Pool size for pool features");
  cov_cmd->add_option("--c", coverage.c, "Self-concordance constant");
  cov_cmd->add_option("--gamma-scale", coverage.gamma_scale, "Multiplier on the base radius");
  cov_cmd->add_option("--radius-scale", coverage.radius_scale, "Radius scale (negative control)");
  cov_cmd->add_option("--jobs", coverage.jobs, "Parallel trial budget");
  cov_cmd->add_option("--out", coverage.out, "Output directory");
  auto* cov_seed = cov_cmd->add_option("--seed", coverage.seed, "Master seed");
  add_config_option(cov_cmd, coverage.config);

  auto* verify_cmd = app.add_subcommand("verify", "Statistical verification checks");
  verify_cmd->require_subcommand(1);
  auto* sm_cmd = verify_cmd->add_subcommand("supermartingale",
                                            "One-step conditional supermartingale check");
  auto* th_cmd = verify_cmd->add_subcommand("theorem", "Anytime tail-bound violation rate");
  CLI::Option* sm_seed = nullptr;
  CLI::Option* th_seed = nullptr;
  for (auto* cmd : {sm_cmd, th_cmd}) {
    cmd->add_option("--d", verify.d, "Dimension");
    cmd->add_option("--horizon", verify.horizon, "Steps per trajectory");
    cmd->add_option("--replicates", verify.replicates, "Conditional resamples per step");
    cmd->add_option("--n-xi", verify.n_xi, "Number of xi directions");
    cmd->add_option("--lambda", verify.reg_weight, "Regularization weight");
    cmd->add_option("--S", verify.norm_bound, "Parameter ball radius");
    cmd->add_option("--kappa", verify.kappa, "Weight safety factor");
    cmd->add_option("--delta", verify.delta, "Confidence parameter");
    cmd->add_option("--trials", verify.trials, "Trajectories for the tail bound");
    cmd->add_option("--weight-mode", verify.weight_mode, "true | estimate | one | zero");
    cmd->add_option("--radius-scale", verify.radius_scale, "Radius scale (negative control)");
    cmd->add_option("--jobs", verify.jobs, "Parallel trajectory budget");
    cmd->add_option("--out", verify.out, "Output directory");
    auto* seed_opt = cmd->add_option("--seed", verify.seed, "Master seed");
    if (cmd == sm_cmd) sm_seed = seed_opt;
    else th_seed = seed_opt;
    add_config_option(cmd, verify.config);
  }

  auto* adapt_cmd = app.add_subcommand("adapt", "Single uncertainty-guided adaptation run");
  adapt_cmd->add_option("--d", adapt.d, "Dimension");
  adapt_cmd->add_option("--S", adapt.norm_bound, "Parameter ball radius");
  adapt_cmd->add_option("--lambda", adapt.reg_weight, "Regularization weight");
  adapt_cmd->add_option("--delta", adapt.delta, "Confidence parameter for reported scores");
  adapt_cmd->add_option("--rounds", adapt.rounds, "Interaction rounds");
  adapt_cmd->add_option("--pool-size", adapt.pool_size, "Candidates per pool");
  adapt_cmd->add_option("--pool-policy", adapt.pool_policy, "fixed | fresh | direction");
  adapt_cmd->add_option("--strategy", adapt.strategy, "uncertainty | random");
  adapt_cmd->add_option("--out", adapt.out, "Output directory");
  auto* adapt_seed = adapt_cmd->add_option("--seed", adapt.seed, "Master seed");
  add_config_option(adapt_cmd, adapt.config);

  auto* bench_cmd = app.add_subcommand("bench-active",
                                       "Paired uncertainty-vs-random efficiency benchmark");
  bench_cmd->add_option("--d", bench.d, "Dimension");
  bench_cmd->add_option("--S", bench.norm_bound, "Parameter ball radius");
  bench_cmd->add_option("--lambda", bench.reg_weight, "Regularization weight");
  bench_cmd->add_option("--delta", bench.delta, "Confidence parameter for reported scores");
  bench_cmd->add_option("--pool-size", bench.pool_size, "Candidates per pool");
  bench_cmd->add_option("--horizon", bench.horizon, "Rounds per run");
  bench_cmd->add_option("--seeds", bench.seeds, "Paired seeds");
  bench_cmd->add_option("--efficiency-threshold", bench.threshold, "Required efficiency ratio");
  bench_cmd->add_option("--jobs", bench.jobs, "Parallel seed budget");
  bench_cmd->add_option("--out", bench.out, "Output directory");
  auto* bench_seed = bench_cmd->add_option("--seed", bench.seed, "Master seed");
  add_config_option(bench_cmd, bench.config);

  auto* mft_cmd = app.add_subcommand("mf-train", "Fit a logistic factorization to a CSV");
  mft_cmd->add_option("--data", mf_train.data, "CSV with header user_id,item_id,outcome")
      ->required();
  mft_cmd->add_option("--heldout", mf_train.heldout, "Held-out CSV for AUC/log-loss");
  mft_cmd->add_option("--rank", mf_train.rank, "Latent dimension J");
  mft_cmd->add_option("--beta", mf_train.reg_weight, "User-factor L2 weight");
  mft_cmd->add_option("--B", mf_train.norm_bound, "Factor column norm cap");
  mft_cmd->add_option("--tol", mf_train.tolerance, "Relative objective tolerance");
  mft_cmd->add_option("--max-sweeps", mf_train.max_sweeps, "Sweep cap");
  mft_cmd->add_flag("--raw-svd", mf_train.raw_svd, "Skip the -1/2 centering before the init SVD");
  mft_cmd->add_option("--out", mf_train.out, "Output directory");
  auto* mft_seed = mft_cmd->add_option("--seed", mf_train.seed, "Master seed");
  add_config_option(mft_cmd, mf_train.config);

  auto* mfs_cmd = app.add_subcommand("mf-scaling", "Factorization error scaling over a grid");
  mfs_cmd->add_option("--grid", mf_scaling.grid, "Cells as NxM, comma separated");
  mfs_cmd->add_option("--rank", mf_scaling.rank, "Latent dimension J");
  mfs_cmd->add_option("--seeds", mf_scaling.seeds, "Seeds per cell");
  mfs_cmd->add_option("--B", mf_scaling.norm_bound, "Factor column norm cap");
  mfs_cmd->add_option("--delta", mf_scaling.delta, "Confidence parameter in the bound");
  mfs_cmd->add_option("--beta", mf_scaling.reg_weight, "User-factor L2 weight");
  mfs_cmd->add_option("--mu-min", mf_scaling.mu_min, "User-covariance eigenvalue floor");
  mfs_cmd->add_flag("--init-stability", mf_scaling.init_stability,
                    "Also compare SVD-init vs random-init variance");
  mfs_cmd->add_option("--jobs", mf_scaling.jobs, "Parallel cell budget");
  mfs_cmd->add_option("--out", mf_scaling.out, "Output directory");
  auto* mfs_seed = mfs_cmd->add_option("--seed", mf_scaling.seed, "Master seed");
  add_config_option(mfs_cmd, mf_scaling.config);

  auto* mle_cmd = app.add_subcommand("mle-fit", "Fit the regularized logistic MLE");
  mle_cmd->add_option("--data", mle_fit.data, "CSV with header x1,...,xd,outcome");
  mle_cmd->add_option("--d", mle_fit.d, "Dimension (synthetic mode)");
  mle_cmd->add_option("--S", mle_fit.norm_bound, "Parameter ball radius");
  mle_cmd->add_option("--lambda", mle_fit.reg_weight, "Regularization weight");
  mle_cmd->add_option("--delta", mle_fit.delta, "Confidence parameter (synthetic mode)");
  mle_cmd->add_option("--horizon", mle_fit.horizon, "Stream length (synthetic mode)");
  mle_cmd->add_option("--tol", mle_fit.tolerance, "Gradient-norm tolerance");
  mle_cmd->add_option("--out", mle_fit.out, "Output directory");
  auto* mle_seed = mle_cmd->add_option("--seed", mle_fit.seed, "Master seed");
  add_config_option(mle_cmd, mle_fit.config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "prefband: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (cov_cmd->parsed()) {
      apply_config_file(cov_cmd, coverage.config);
      return run_coverage_cmd(coverage, resolve_seed(cov_seed, coverage.seed));
    }
    if (sm_cmd->parsed()) {
      apply_config_file(sm_cmd, verify.config);
      return run_verify_supermartingale(verify, resolve_seed(sm_seed, verify.seed));
    }
    if (th_cmd->parsed()) {
      apply_config_file(th_cmd, verify.config);
      return run_verify_theorem(verify, resolve_seed(th_seed, verify.seed));
    }
    if (adapt_cmd->parsed()) {
      apply_config_file(adapt_cmd, adapt.config);
      return run_adapt_cmd(adapt, resolve_seed(adapt_seed, adapt.seed));
    }
    if (bench_cmd->parsed()) {
      apply_config_file(bench_cmd, bench.config);
      return run_bench_cmd(bench, resolve_seed(bench_seed, bench.seed));
    }
    if (mft_cmd->parsed()) {
      apply_config_file(mft_cmd, mf_train.config);
      return run_mf_train_cmd(mf_train, resolve_seed(mft_seed, mf_train.seed));
    }
    if (mfs_cmd->parsed()) {
      apply_config_file(mfs_cmd, mf_scaling.config);
      return run_mf_scaling_cmd(mf_scaling, resolve_seed(mfs_seed, mf_scaling.seed));
    }
    if (mle_cmd->parsed()) {
      apply_config_file(mle_cmd, mle_fit.config);
      return run_mle_fit_cmd(mle_fit, resolve_seed(mle_seed, mle_fit.seed));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "prefband: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "prefband: " << e.what() << '\n';
    return kExitUsage;
  }
  std::cerr << "prefband: no subcommand\n";
  return kExitUsage;
}
