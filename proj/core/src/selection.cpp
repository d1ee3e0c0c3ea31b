#include "prefband/selection.hpp"

#include "prefband/confidence.hpp"
#include "prefband/logistic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace prefband {

CandidatePool::CandidatePool(std::vector<Vector> cands) : candidates(std::move(cands)) {
  if (candidates.empty()) throw std::invalid_argument("CandidatePool: empty pool");
  const Eigen::Index d = candidates.front().size();
  for (const Vector& phi : candidates) {
    if (phi.size() != d) throw std::invalid_argument("CandidatePool: mixed dimensions");
    if (phi.norm() > 1.0 + 1e-12) throw std::invalid_argument("CandidatePool: ‖φ‖ must be <= 1");
  }
}

double uncertainty_score(const Vector& phi, const HessianMatrix& hessian_at_estimate, double zeta) {
  if (zeta < 0.0) throw std::invalid_argument("uncertainty_score: zeta must be nonnegative");
  return zeta * inverse_metric_norm(hessian_at_estimate, phi);
}

std::size_t select_from_pool(const CandidatePool& pool, const HessianMatrix& hessian) {
  std::size_t best = 0;
  double best_score = inverse_metric_norm(hessian, pool.candidates[0]);
  for (std::size_t i = 1; i < pool.candidates.size(); ++i) {
    const double score = inverse_metric_norm(hessian, pool.candidates[i]);
    if (score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

Vector optimal_direction(const HessianMatrix& hessian) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian.matrix());
  const Vector& values = eig.eigenvalues();  // ascending
  const Eigen::Index d = hessian.dim();
  const double lo = values[0];
  const double tie_tol = 1e-9 * std::max(1.0, std::abs(lo));

  // Projector onto the minimal eigenspace; scan standard basis vectors for
  // a deterministic representative.
  Matrix projector = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (values[k] <= lo + tie_tol) {
      const Vector v = eig.eigenvectors().col(k);
      projector += v * v.transpose();
    }
  }
  Vector dir = Vector::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector candidate = projector * Vector::Unit(d, k);
    if (candidate.norm() > 1e-8) {
      dir = candidate / candidate.norm();
      break;
    }
  }
  if (dir.norm() == 0.0) dir = eig.eigenvectors().col(0);  // cannot happen for a real projector

  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(dir[k]) > 1e-12) {
      if (dir[k] < 0.0) dir = -dir;
      break;
    }
  }
  return dir;
}

PreferenceWorld::PreferenceWorld(Vector lambda_star, double norm_bound)
    : lambda_star_(std::move(lambda_star)), norm_bound_(norm_bound) {
  if (norm_bound_ <= 0.0) throw std::invalid_argument("PreferenceWorld: norm_bound must be positive");
  if (lambda_star_.norm() > norm_bound_ + 1e-12)
    throw std::invalid_argument("PreferenceWorld: ‖λ*‖ exceeds norm_bound");
}

int PreferenceWorld::respond(const Vector& phi, double uniform_draw) const {
  if (phi.size() != lambda_star_.size())
    throw std::invalid_argument("PreferenceWorld: dimension mismatch");
  return uniform_draw < sigmoid(lambda_star_.dot(phi)) ? 1 : 0;
}

std::string strategy_name(Strategy s) {
  return s == Strategy::Uncertainty ? "uncertainty" : "random";
}

void AdaptationConfig::validate() const {
  if (rounds < 1) throw std::invalid_argument("AdaptationConfig: rounds must be >= 1");
  if (reg_weight <= 0.0) throw std::invalid_argument("AdaptationConfig: reg_weight must be positive");
  if (norm_bound <= 0.0) throw std::invalid_argument("AdaptationConfig: norm_bound must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("AdaptationConfig: delta must lie in (0,1]");
  if (pool_policy != PoolPolicy::OptimalDirection && pool_size < 1)
    throw std::invalid_argument("AdaptationConfig: pool_size must be >= 1");
  solver.validate();
}

namespace {

// Candidates model response-pair differences: direction uniform, magnitude
// uniform in [0,1] so pools mix near-duplicate pairs with contrasting ones.
CandidatePool draw_pool(int pool_size, Eigen::Index d, RngStream& rng) {
  std::vector<Vector> cands;
  cands.reserve(static_cast<std::size_t>(pool_size));
  for (int i = 0; i < pool_size; ++i) cands.push_back(rng.uniform() * rng.unit_sphere(d));
  return CandidatePool(std::move(cands));
}

}  // namespace

AdaptationResult run_adaptation(const PreferenceWorld& world, const AdaptationConfig& config,
                                RngStream pool_rng, RngStream noise_rng, RngStream strategy_rng,
                                const CandidatePool* fixed_pool) {
  config.validate();
  const Eigen::Index d = world.dim();
  if (config.pool_policy == PoolPolicy::FixedPool && fixed_pool == nullptr)
    throw std::invalid_argument("run_adaptation: FixedPool policy needs a pool");

  Dataset data;
  data.reserve(static_cast<std::size_t>(config.rounds));
  Vector lambda_est = Vector::Zero(d);
  AdaptationResult result{{}, {}, ModelParams(lambda_est, config.norm_bound, config.reg_weight), {}};
  result.history.reserve(static_cast<std::size_t>(config.rounds));
  result.estimates.reserve(static_cast<std::size_t>(config.rounds));

  RadiusParams rp;
  rp.delta = config.delta;
  rp.dim = static_cast<int>(d);
  rp.reg_weight = config.reg_weight;
  rp.norm_bound = config.norm_bound;

  for (int round = 1; round <= config.rounds; ++round) {
    const ModelParams current(lambda_est, config.norm_bound, config.reg_weight);
    const HessianMatrix h = hessian(current, data);

    // ζ is a common positive factor across candidates: reported on the
    // score, irrelevant to the argmax. A vacuous (infinite) factor is
    // reported as such rather than poisoning the comparison.
    const double gamma = tail_radius(h, rp);
    const double zeta = zeta_radius(gamma, rp);

    Vector phi;
    std::ptrdiff_t selected = -1;
    const bool explore_randomly = (round == 1) || config.strategy == Strategy::Random;

    if (config.pool_policy == PoolPolicy::OptimalDirection) {
      phi = explore_randomly ? strategy_rng.unit_sphere(d) : optimal_direction(h);
    } else {
      const CandidatePool fresh = config.pool_policy == PoolPolicy::FreshPool
                                      ? draw_pool(config.pool_size, d, pool_rng)
                                      : CandidatePool(*fixed_pool);
      const std::size_t idx = explore_randomly
                                  ? static_cast<std::size_t>(strategy_rng.uniform_int(
                                        static_cast<std::int64_t>(fresh.size())))
                                  : select_from_pool(fresh, h);
      phi = fresh.candidates[idx];
      selected = static_cast<std::ptrdiff_t>(idx);
    }

    const double score = uncertainty_score(phi, h, std::isfinite(zeta) ? zeta : 1.0);
    const int outcome = world.respond(phi, noise_rng.uniform());
    data.emplace_back(phi, outcome);

    const FitResult fit = fit_mle(data, config.reg_weight, config.solver, config.norm_bound, lambda_est);
    lambda_est = fit.estimate.theta;

    AdaptationRound rec;
    rec.round = round;
    rec.selected = selected;
    rec.outcome = outcome;
    rec.score = score;
    rec.estimate_error = (lambda_est - world.lambda_star()).norm();
    rec.solver_converged = fit.converged;
    result.history.push_back(rec);
    result.estimates.push_back(lambda_est);
  }

  result.final_estimate = ModelParams(lambda_est, config.norm_bound, config.reg_weight);
  result.data = std::move(data);
  return result;
}

}  // namespace prefband
