#include "prefband/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prefband {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Observation::Observation(Vector features, int outcome)
    : features_(std::move(features)), outcome_(outcome) {
  require(features_.size() > 0, "Observation: empty feature vector");
  require(features_.allFinite(), "Observation: non-finite feature");
  require(features_.norm() <= 1.0 + 1e-12, "Observation: feature norm exceeds 1");
  require(outcome_ == 0 || outcome_ == 1, "Observation: outcome must be 0 or 1");
}

ModelParams::ModelParams(Vector theta_in, double norm_bound_in, double reg_weight_in)
    : theta(std::move(theta_in)), norm_bound(norm_bound_in), reg_weight(reg_weight_in) {
  require(theta.size() > 0, "ModelParams: empty parameter vector");
  require(theta.allFinite(), "ModelParams: non-finite parameter");
  require(norm_bound > 0.0, "ModelParams: norm_bound must be positive");
  require(reg_weight > 0.0, "ModelParams: reg_weight must be positive");
}

HessianMatrix::HessianMatrix(Matrix m, Vector eval_point, double reg_weight)
    : matrix_(std::move(m)), eval_point_(std::move(eval_point)), reg_weight_(reg_weight) {
  require(matrix_.rows() == matrix_.cols(), "HessianMatrix: not square");
  require(matrix_.rows() == eval_point_.size(), "HessianMatrix: eval point dimension mismatch");
  require(reg_weight_ > 0.0, "HessianMatrix: reg_weight must be positive");
  require(matrix_.allFinite(), "HessianMatrix: non-finite entry");
  const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12, "HessianMatrix: asymmetry exceeds 1e-12");

  // Min-eigenvalue floor λ − 1e-9: the shifted matrix must stay PSD.
  Matrix shifted = matrix_;
  shifted.diagonal().array() -= (reg_weight_ - 1e-9);
  Eigen::LDLT<Matrix> probe(shifted);
  require(probe.info() == Eigen::Success && probe.isPositive(),
          "HessianMatrix: minimum eigenvalue below reg_weight floor");

  llt_.compute(matrix_);
  require(llt_.info() == Eigen::Success, "HessianMatrix: Cholesky factorization failed");
}

double HessianMatrix::log_det() const {
  return 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double metric_norm(const HessianMatrix& h, const Vector& v) {
  if (v.size() != h.dim()) throw std::invalid_argument("metric_norm: dimension mismatch");
  return std::sqrt(std::max(0.0, v.dot(h.matrix() * v)));
}

double inverse_metric_norm(const HessianMatrix& h, const Vector& v) {
  if (v.size() != h.dim()) throw std::invalid_argument("inverse_metric_norm: dimension mismatch");
  return std::sqrt(std::max(0.0, v.dot(h.llt().solve(v))));
}

}  // namespace prefband
