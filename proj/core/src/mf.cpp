#include "prefband/mf.hpp"

#include "prefband/logistic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace prefband {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Vector project_ball(Vector v, double radius) {
  if (radius <= 0.0) return v;
  const double n = v.norm();
  if (n > radius) v *= radius / n;
  return v;
}

}  // namespace

PreferenceData::PreferenceData(std::vector<PreferenceEntry> entries, int n_users, int n_items)
    : entries_(std::move(entries)), n_users_(n_users), n_items_(n_items) {}

PreferenceData PreferenceData::from_raw(const std::vector<RawPreference>& raw, int n_users,
                                        int n_items) {
  require(n_users > 0 && n_items > 0, "PreferenceData: shape must be positive");
  std::map<std::pair<int, int>, std::pair<double, int>> acc;  // (sum, count)
  for (const RawPreference& r : raw) {
    require(r.user >= 0 && r.user < n_users, "PreferenceData: user index out of range");
    require(r.item >= 0 && r.item < n_items, "PreferenceData: item index out of range");
    require(r.outcome >= 0.0 && r.outcome <= 1.0, "PreferenceData: outcome outside [0,1]");
    auto& slot = acc[{r.user, r.item}];
    slot.first += r.outcome;
    slot.second += 1;
  }
  std::vector<PreferenceEntry> entries;
  entries.reserve(acc.size());
  for (const auto& [key, slot] : acc) {
    const double mean = slot.first / slot.second;
    if (mean == 0.5) continue;  // tie: drop
    entries.push_back({key.first, key.second, mean > 0.5 ? 1 : 0});
  }
  return PreferenceData(std::move(entries), n_users, n_items);
}

PreferenceData PreferenceData::from_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "PreferenceData: empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "user_id,item_id,outcome",
          "PreferenceData: expected header 'user_id,item_id,outcome'");

  std::vector<RawPreference> raw;
  int max_user = -1;
  int max_item = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    RawPreference r{};
    require(static_cast<bool>(std::getline(row, field, ',')), "PreferenceData: bad row");
    r.user = std::stoi(field);
    require(static_cast<bool>(std::getline(row, field, ',')), "PreferenceData: bad row");
    r.item = std::stoi(field);
    require(static_cast<bool>(std::getline(row, field, ',')), "PreferenceData: bad row");
    r.outcome = std::stod(field);
    max_user = std::max(max_user, r.user);
    max_item = std::max(max_item, r.item);
    raw.push_back(r);
  }
  require(!raw.empty(), "PreferenceData: no rows");
  return from_raw(raw, max_user + 1, max_item + 1);
}

double PreferenceData::density() const {
  return static_cast<double>(entries_.size()) /
         (static_cast<double>(n_users_) * static_cast<double>(n_items_));
}

Matrix FactorizationModel::probabilities() const {
  return logits().unaryExpr([](double z) { return sigmoid(z); });
}

std::string FactorizationModel::to_json_string() const {
  nlohmann::json j;
  j["rank"] = rank();
  j["n_users"] = n_users();
  j["n_items"] = n_items();
  j["reg_weight"] = reg_weight;
  j["norm_bound"] = norm_bound;
  auto flatten = [](const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
  };
  j["user_factors"] = flatten(user_factors);
  j["item_factors"] = flatten(item_factors);
  return j.dump(2);
}

FactorizationModel FactorizationModel::from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int rank = j.at("rank").get<int>();
  const int n_users = j.at("n_users").get<int>();
  const int n_items = j.at("n_items").get<int>();
  require(rank > 0 && n_users > 0 && n_items > 0, "FactorizationModel: bad shape header");

  auto unflatten = [](const std::vector<double>& flat, int rows, int cols) {
    require(static_cast<int>(flat.size()) == rows * cols, "FactorizationModel: factor size mismatch");
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = flat[k++];
    return m;
  };
  FactorizationModel model;
  model.user_factors = unflatten(j.at("user_factors").get<std::vector<double>>(), rank, n_users);
  model.item_factors = unflatten(j.at("item_factors").get<std::vector<double>>(), rank, n_items);
  model.reg_weight = j.at("reg_weight").get<double>();
  model.norm_bound = j.at("norm_bound").get<double>();
  return model;
}

FactorizationModel svd_init(const PreferenceData& data, int rank, bool centered) {
  require(rank >= 1, "svd_init: rank must be >= 1");
  require(rank <= std::min(data.n_users(), data.n_items()), "svd_init: rank exceeds min(U, M)");

  Matrix dense = Matrix::Zero(data.n_users(), data.n_items());
  for (const PreferenceEntry& e : data.entries()) {
    dense(e.user, e.item) = centered ? (static_cast<double>(e.outcome) - 0.5)
                                     : static_cast<double>(e.outcome);
  }

  Eigen::BDCSVD<Matrix> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sqrt_sv = svd.singularValues().head(rank).cwiseSqrt();

  FactorizationModel model;
  model.user_factors = sqrt_sv.asDiagonal() * svd.matrixU().leftCols(rank).transpose();
  model.item_factors = sqrt_sv.asDiagonal() * svd.matrixV().leftCols(rank).transpose();
  model.reg_weight = 0.0;
  model.norm_bound = 0.0;
  return model;
}

void MfFitConfig::validate() const {
  if (tolerance <= 0.0) throw std::invalid_argument("MfFitConfig: tolerance must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("MfFitConfig: max_sweeps must be >= 1");
  if (block_iterations < 1) throw std::invalid_argument("MfFitConfig: block_iterations must be >= 1");
}

double mf_objective(const PreferenceData& data, const FactorizationModel& model) {
  double obj = 0.0;
  for (const PreferenceEntry& e : data.entries()) {
    const double z = model.user_factors.col(e.user).dot(model.item_factors.col(e.item));
    obj += static_cast<double>(e.outcome) * z - softplus(z);
  }
  obj -= 0.5 * model.reg_weight * model.user_factors.squaredNorm();
  return obj;
}

namespace {

// Concave logistic block: maximize Σ_k [a_k z − softplus(z)] − (reg/2)‖v‖²
// over ‖v‖ ≤ cap, with z = w_kᵀv. Projected Newton, monotone accepts only.
Vector solve_block(const std::vector<const Vector*>& features, const std::vector<int>& labels,
                   Vector v, double reg, double cap, int max_iters) {
  const Eigen::Index d = v.size();
  auto value = [&](const Vector& u) {
    double f = -0.5 * reg * u.squaredNorm();
    for (std::size_t k = 0; k < features.size(); ++k) {
      const double z = features[k]->dot(u);
      f += static_cast<double>(labels[k]) * z - softplus(z);
    }
    return f;
  };

  double f = value(v);
  for (int iter = 0; iter < max_iters; ++iter) {
    Vector grad = -reg * v;
    Matrix h = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < features.size(); ++k) {
      const double z = features[k]->dot(v);
      grad += (static_cast<double>(labels[k]) - sigmoid(z)) * (*features[k]);
      h.selfadjointView<Eigen::Lower>().rankUpdate(*features[k], sigmoid_derivative(z));
    }
    h = h.selfadjointView<Eigen::Lower>();
    h.diagonal().array() += (reg > 0.0 ? reg : 1e-9);

    if (grad.norm() <= 1e-10) break;
    const Vector step = Eigen::LLT<Matrix>(h).solve(grad);

    double eta = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      Vector candidate = project_ball(v + eta * step, cap);
      const double fc = value(candidate);
      if (fc > f) {
        const double move = (candidate - v).norm();
        v = std::move(candidate);
        f = fc;
        moved = true;
        if (move <= 1e-12 * (1.0 + v.norm())) iter = max_iters;  // converged
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }
  return v;
}

}  // namespace

MfFitResult fit_logistic_mf(const PreferenceData& data, const FactorizationModel& init,
                            double reg_weight, double norm_bound, const MfFitConfig& config) {
  config.validate();
  require(reg_weight >= 0.0, "fit_logistic_mf: reg_weight must be nonnegative");
  require(norm_bound > 0.0, "fit_logistic_mf: norm_bound must be positive");
  require(init.n_users() == data.n_users() && init.n_items() == data.n_items(),
          "fit_logistic_mf: init shape mismatch");

  FactorizationModel model = init;
  model.reg_weight = reg_weight;
  model.norm_bound = norm_bound;
  for (int u = 0; u < model.n_users(); ++u)
    model.user_factors.col(u) = project_ball(model.user_factors.col(u), norm_bound);
  for (int m = 0; m < model.n_items(); ++m)
    model.item_factors.col(m) = project_ball(model.item_factors.col(m), norm_bound);

  // Index entries once per direction.
  std::vector<std::vector<std::size_t>> by_user(static_cast<std::size_t>(data.n_users()));
  std::vector<std::vector<std::size_t>> by_item(static_cast<std::size_t>(data.n_items()));
  const auto& entries = data.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    by_user[static_cast<std::size_t>(entries[k].user)].push_back(k);
    by_item[static_cast<std::size_t>(entries[k].item)].push_back(k);
  }

  MfFitResult result{model, {mf_objective(data, model)}, 0, false};

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    if (config.update_users) {
      for (int u = 0; u < model.n_users(); ++u) {
        const auto& idx = by_user[static_cast<std::size_t>(u)];
        if (idx.empty()) continue;
        std::vector<const Vector*> feats;
        std::vector<int> labels;
        feats.reserve(idx.size());
        labels.reserve(idx.size());
        std::vector<Vector> cols;
        cols.reserve(idx.size());
        for (std::size_t k : idx) cols.emplace_back(model.item_factors.col(entries[k].item));
        for (std::size_t j = 0; j < idx.size(); ++j) {
          feats.push_back(&cols[j]);
          labels.push_back(entries[idx[j]].outcome);
        }
        model.user_factors.col(u) = solve_block(feats, labels, model.user_factors.col(u),
                                                reg_weight, norm_bound, config.block_iterations);
      }
    }
    if (config.update_items) {
      for (int m = 0; m < model.n_items(); ++m) {
        const auto& idx = by_item[static_cast<std::size_t>(m)];
        if (idx.empty()) continue;
        std::vector<const Vector*> feats;
        std::vector<int> labels;
        feats.reserve(idx.size());
        labels.reserve(idx.size());
        std::vector<Vector> cols;
        cols.reserve(idx.size());
        for (std::size_t k : idx) cols.emplace_back(model.user_factors.col(entries[k].user));
        for (std::size_t j = 0; j < idx.size(); ++j) {
          feats.push_back(&cols[j]);
          labels.push_back(entries[idx[j]].outcome);
        }
        model.item_factors.col(m) = solve_block(feats, labels, model.item_factors.col(m), 0.0,
                                                norm_bound, config.block_iterations);
      }
    }

    const double obj = mf_objective(data, model);
    const double prev = result.objective_trace.back();
    result.objective_trace.push_back(obj);
    result.sweeps = sweep + 1;
    if (obj + 1e-9 < prev)
      throw std::logic_error("fit_logistic_mf: objective decreased across a sweep");
    if (std::abs(obj - prev) <= config.tolerance * (1.0 + std::abs(obj))) {
      result.converged = true;
      break;
    }
  }

  result.model = std::move(model);
  return result;
}

double MfBoundParams::alpha() const {
  return sigmoid_derivative(logit_bound + logit_buffer) * min_eig_user_cov;
}

void MfBoundParams::validate() const {
  if (latent_dim < 1 || n_users < 1 || n_items < 1)
    throw std::invalid_argument("MfBoundParams: shape must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("MfBoundParams: delta must lie in (0,1)");
  if (const_c <= 0.0) throw std::invalid_argument("MfBoundParams: const_c must be positive");
  if (min_eig_user_cov <= 0.0) throw std::invalid_argument("MfBoundParams: min_eig_user_cov must be positive");
  if (logit_bound <= 0.0) throw std::invalid_argument("MfBoundParams: logit_bound must be positive");
  if (logit_buffer <= 0.0) throw std::invalid_argument("MfBoundParams: logit_buffer must be positive");
}

MfErrorBound mf_error_bound(const MfBoundParams& params) {
  params.validate();
  const double d = params.latent_dim;
  const double n = params.n_users;
  const double m = params.n_items;
  const double root = std::sqrt(d * (n + m) * std::log(1.0 / params.delta) / (n * m));
  const double epsilon = params.const_c * root;
  return MfErrorBound{params.const_c * root, epsilon, std::sqrt(4.0 * epsilon / params.alpha())};
}

double strong_convexity_certificate(const Matrix& user_factors, double logit_bound,
                                    double logit_buffer) {
  require(user_factors.size() > 0, "strong_convexity_certificate: empty factors");
  const Matrix cov = user_factors * user_factors.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  const double min_eig = std::max(0.0, eig.eigenvalues().minCoeff());
  return sigmoid_derivative(logit_bound + logit_buffer) * min_eig;
}

namespace {

double max_col_norm(const Matrix& m) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) best = std::max(best, m.col(c).norm());
  return best;
}

}  // namespace

MfMetrics evaluate_mf(const FactorizationModel& model, const FactorizationModel& truth) {
  require(model.n_users() == truth.n_users() && model.n_items() == truth.n_items(),
          "evaluate_mf: shape mismatch");
  const Matrix p = model.probabilities();
  const Matrix p_true = truth.probabilities();
  const Matrix gap = (p - p_true).cwiseAbs();

  MfMetrics metrics;
  metrics.prob_mean_abs_err = gap.mean();
  metrics.prob_max_abs_err = gap.maxCoeff();
  metrics.max_user_col_norm = max_col_norm(model.user_factors);
  metrics.max_item_col_norm = max_col_norm(model.item_factors);

  if (model.rank() == truth.rank()) {
    double sum = 0.0;
    double worst = 0.0;
    for (int m = 0; m < model.n_items(); ++m) {
      const double err = (model.item_factors.col(m) - truth.item_factors.col(m)).norm();
      sum += err;
      worst = std::max(worst, err);
    }
    metrics.mean_item_col_err = sum / model.n_items();
    metrics.max_item_col_err = worst;
  }
  return metrics;
}

MfMetrics evaluate_mf(const FactorizationModel& model, const PreferenceData& heldout) {
  require(model.n_users() >= heldout.n_users() && model.n_items() >= heldout.n_items(),
          "evaluate_mf: held-out indices exceed model shape");
  MfMetrics metrics;
  metrics.max_user_col_norm = max_col_norm(model.user_factors);
  metrics.max_item_col_norm = max_col_norm(model.item_factors);

  std::vector<std::pair<double, int>> scored;  // (predicted probability, outcome)
  scored.reserve(heldout.entries().size());
  double loss = 0.0;
  for (const PreferenceEntry& e : heldout.entries()) {
    const double z = model.user_factors.col(e.user).dot(model.item_factors.col(e.item));
    scored.emplace_back(sigmoid(z), e.outcome);
    loss -= static_cast<double>(e.outcome) * z - softplus(z);
  }
  if (!scored.empty()) metrics.log_loss = loss / static_cast<double>(scored.size());

  // Tie-averaged rank AUC.
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  long n_pos = 0;
  long n_neg = 0;
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (scored[k].second == 1) {
        ++n_pos;
        rank_sum_pos += avg_rank;
      } else {
        ++n_neg;
      }
    }
    i = j;
  }
  if (n_pos > 0 && n_neg > 0) {
    metrics.auc = (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1)) /
                  (static_cast<double>(n_pos) * static_cast<double>(n_neg));
  }
  return metrics;
}

}  // namespace prefband
