#include "prefband/martingale.hpp"

#include "prefband/confidence.hpp"
#include "prefband/logistic.hpp"
#include "prefband/parallel.hpp"
#include "prefband/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prefband {

NoiseDraw noise_model(double p, double kappa, RngStream& rng) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("noise_model: p must lie in (0,1)");
  if (kappa <= 0.0) throw std::invalid_argument("noise_model: kappa must be positive");
  const int r = rng.bernoulli(p) ? 1 : 0;
  return NoiseDraw{p - static_cast<double>(r), std::min(1.0, kappa * p * (1.0 - p)), r};
}

MartingaleTrace::MartingaleTrace(Vector xi) : xi_(std::move(xi)) {
  if (xi_.size() == 0) throw std::invalid_argument("MartingaleTrace: empty xi");
  if (xi_.norm() > 1.0 + 1e-12) throw std::invalid_argument("MartingaleTrace: ‖xi‖ must be <= 1");
}

void MartingaleTrace::update(const Vector& x, double epsilon, double weight) {
  if (x.size() != xi_.size()) throw std::invalid_argument("MartingaleTrace: dimension mismatch");
  if (x.norm() > 1.0 + 1e-12) throw std::invalid_argument("MartingaleTrace: ‖x‖ must be <= 1");
  if (std::abs(epsilon) > 1.0 + 1e-12) throw std::invalid_argument("MartingaleTrace: |epsilon| must be <= 1");
  if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("MartingaleTrace: weight outside [0,1]");

  const double u = xi_.dot(x);
  Vector s_next = s() + epsilon * x;
  const double q_next = q() + weight * u * u;
  s_values_.push_back(std::move(s_next));
  q_values_.push_back(q_next);
  m_values_.push_back(std::exp(xi_.dot(s_values_.back()) - q_next));
  weights_.push_back(weight);
}

Vector MartingaleTrace::s() const {
  return s_values_.empty() ? Vector(Vector::Zero(xi_.size())) : s_values_.back();
}
double MartingaleTrace::q() const { return q_values_.empty() ? 0.0 : q_values_.back(); }
double MartingaleTrace::m() const { return m_values_.empty() ? 1.0 : m_values_.back(); }

std::string weight_mode_name(WeightMode mode) {
  switch (mode) {
    case WeightMode::TrueProbability: return "true_probability";
    case WeightMode::Estimate: return "estimate";
    case WeightMode::One: return "one";
    case WeightMode::Zero: return "zero";
  }
  return "unknown";
}

void MartingaleConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("MartingaleConfig: dim must be >= 1");
  if (horizon < 1) throw std::invalid_argument("MartingaleConfig: horizon must be >= 1");
  if (replicates < 100) throw std::invalid_argument("MartingaleConfig: replicates must be >= 100");
  if (n_xi < 1) throw std::invalid_argument("MartingaleConfig: n_xi must be >= 1");
  if (reg_weight <= 0.0) throw std::invalid_argument("MartingaleConfig: reg_weight must be positive");
  if (norm_bound <= 0.0) throw std::invalid_argument("MartingaleConfig: norm_bound must be positive");
  if (kappa <= 0.0) throw std::invalid_argument("MartingaleConfig: kappa must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("MartingaleConfig: delta must lie in (0,1]");
  if (n_trajectories < 1) throw std::invalid_argument("MartingaleConfig: n_trajectories must be >= 1");
  if (radius_scale < 0.0) throw std::invalid_argument("MartingaleConfig: radius_scale must be nonnegative");
  if (jobs < 1) throw std::invalid_argument("MartingaleConfig: jobs must be >= 1");
}

std::string CheckReport::to_json_string() const {
  nlohmann::json j;
  j["check_name"] = check_name;
  j["statistic"] = statistic;
  j["threshold"] = threshold;
  j["pass"] = pass;
  j["n_replicates"] = n_replicates;
  j["seed"] = seed;
  return j.dump();
}

CheckReport mgf_two_point_check(double kappa, int z_points, int lambda_points) {
  if (kappa <= 0.0) throw std::invalid_argument("mgf_two_point_check: kappa must be positive");
  if (z_points < 2 || lambda_points < 2)
    throw std::invalid_argument("mgf_two_point_check: need at least 2 grid points per axis");

  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < z_points; ++i) {
    const double z = -6.0 + 12.0 * static_cast<double>(i) / static_cast<double>(z_points - 1);
    const double p = sigmoid(z);
    const double omega = std::min(1.0, kappa * p * (1.0 - p));
    for (int k = 0; k < lambda_points; ++k) {
      const double lam = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(lambda_points - 1);
      // ε takes value p−1 with probability p and value p with probability 1−p.
      const double mgf = p * std::exp(lam * (p - 1.0)) + (1.0 - p) * std::exp(lam * p);
      worst = std::max(worst, mgf - std::exp(omega * lam * lam));
    }
  }

  CheckReport report;
  report.check_name = "mgf_two_point";
  report.statistic = worst;
  report.threshold = 1e-12;
  report.pass = worst <= 1e-12;
  report.n_replicates = static_cast<long>(z_points) * lambda_points;
  report.seed = 0;
  return report;
}

namespace {

double step_weight(WeightMode mode, double kappa, double z_true, double z_est) {
  switch (mode) {
    case WeightMode::TrueProbability: return std::min(1.0, kappa * sigmoid_derivative(z_true));
    case WeightMode::Estimate: return std::min(1.0, kappa * sigmoid_derivative(z_est));
    case WeightMode::One: return 1.0;
    case WeightMode::Zero: return 0.0;
  }
  return 1.0;
}

std::vector<Vector> xi_grid(int n_xi, int dim, RngStream& rng) {
  std::vector<Vector> grid;
  grid.reserve(static_cast<std::size_t>(n_xi));
  for (int i = 0; i < n_xi && i < dim; ++i) grid.push_back(Vector::Unit(dim, i));
  while (static_cast<int>(grid.size()) < n_xi) grid.push_back(rng.unit_sphere(dim));
  return grid;
}

}  // namespace

CheckReport verify_supermartingale(const MartingaleConfig& config) {
  config.validate();
  const int d = config.dim;

  RngStream world_rng = RngStream::derive(config.seed, {1, 0});
  const Vector theta_star = config.norm_bound * world_rng.unit_sphere(d);
  const std::vector<Vector> xis = xi_grid(config.n_xi, d, world_rng);

  Dataset prefix;
  prefix.reserve(static_cast<std::size_t>(config.horizon));
  Vector theta_est = Vector::Zero(d);
  double worst = -std::numeric_limits<double>::infinity();

  for (int t = 0; t < config.horizon; ++t) {
    RngStream step_rng = RngStream::derive(config.seed, {2, static_cast<std::uint64_t>(t)});
    const Vector x = world_rng.unit_sphere(d);
    const double z_true = x.dot(theta_star);
    const double p = sigmoid(z_true);

    if (config.weight_mode == WeightMode::Estimate && !prefix.empty()) {
      const FitResult fit = fit_mle(prefix, config.reg_weight, {}, config.norm_bound, theta_est);
      theta_est = fit.estimate.theta;
    }
    const double omega = step_weight(config.weight_mode, config.kappa, z_true, x.dot(theta_est));

    // One conditional resample of ε per replicate, shared across ξ.
    const int k_n = config.replicates;
    std::vector<double> us(xis.size());
    for (std::size_t j = 0; j < xis.size(); ++j) us[j] = xis[j].dot(x);

    std::vector<double> sum(xis.size(), 0.0);
    std::vector<double> sum_sq(xis.size(), 0.0);
    for (int k = 0; k < k_n; ++k) {
      const double eps = noise_model(p, config.kappa, step_rng).epsilon;
      for (std::size_t j = 0; j < xis.size(); ++j) {
        const double v = std::exp(eps * us[j] - omega * us[j] * us[j]);
        sum[j] += v;
        sum_sq[j] += v * v;
      }
    }
    for (std::size_t j = 0; j < xis.size(); ++j) {
      const double mean = sum[j] / k_n;
      const double var = std::max(0.0, sum_sq[j] / k_n - mean * mean);
      const double se = std::sqrt(var / k_n);
      double stat = 0.0;
      if (se > 0.0) {
        stat = (mean - 1.0) / se;
      } else if (mean - 1.0 > 1e-12) {
        stat = std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, stat);
    }

    // Extend the realized prefix with its own draw.
    const NoiseDraw realized = noise_model(p, config.kappa, world_rng);
    prefix.emplace_back(x, realized.outcome);
  }

  CheckReport report;
  report.check_name = "supermartingale_" + weight_mode_name(config.weight_mode);
  report.statistic = worst;
  report.threshold = 3.0;
  report.pass = worst <= 3.0;
  report.n_replicates = config.replicates;
  report.seed = config.seed;
  return report;
}

CheckReport verify_theorem_bound(const MartingaleConfig& config) {
  config.validate();
  const int d = config.dim;
  const int horizon = config.horizon;

  std::vector<int> violated(static_cast<std::size_t>(config.n_trajectories), 0);
  parallel_for_index(config.n_trajectories, config.jobs, [&](int traj) {
    RngStream rng = RngStream::derive(config.seed, {3, static_cast<std::uint64_t>(traj)});
    const Vector theta_star = config.norm_bound * rng.unit_sphere(d);

    Dataset obs;
    obs.reserve(static_cast<std::size_t>(horizon));
    Vector s_vec = Vector::Zero(d);
    Vector warm = Vector::Zero(d);
    bool any_violation = false;

    for (int n = 1; n <= horizon && !any_violation; ++n) {
      const Vector x = rng.unit_sphere(d);
      const NoiseDraw draw = noise_model(sigmoid(x.dot(theta_star)), config.kappa, rng);
      obs.emplace_back(x, draw.outcome);
      s_vec += draw.epsilon * x;

      const FitResult fit = fit_mle(obs, config.reg_weight, {}, config.norm_bound, warm);
      warm = fit.estimate.theta;

      // Design matrix with every past weight re-evaluated at the current
      // estimate, as the tail bound defines it.
      Matrix h = Matrix::Zero(d, d);
      for (const Observation& o : obs) {
        const double w = std::min(1.0, config.kappa * sigmoid_derivative(o.features().dot(warm)));
        h.selfadjointView<Eigen::Lower>().rankUpdate(o.features(), w);
      }
      h = h.selfadjointView<Eigen::Lower>();
      h.diagonal().array() += config.reg_weight;
      const HessianMatrix design(std::move(h), warm, config.reg_weight);

      RadiusParams rp;
      rp.delta = config.delta;
      rp.dim = d;
      rp.reg_weight = config.reg_weight;
      rp.norm_bound = config.norm_bound;
      const double gamma = tail_radius(design, rp);
      if (inverse_metric_norm(design, s_vec) > config.radius_scale * gamma) any_violation = true;
    }
    violated[static_cast<std::size_t>(traj)] = any_violation ? 1 : 0;
  });

  long n_violations = 0;
  for (int v : violated) n_violations += v;
  const double n = static_cast<double>(config.n_trajectories);
  const double rate = static_cast<double>(n_violations) / n;
  const double threshold =
      config.delta + 3.0 * std::sqrt(config.delta * (1.0 - config.delta) / n);

  CheckReport report;
  report.check_name = "theorem_bound";
  report.statistic = rate;
  report.threshold = threshold;
  report.pass = rate <= threshold;
  report.n_replicates = config.n_trajectories;
  report.seed = config.seed;
  return report;
}

}  // namespace prefband
