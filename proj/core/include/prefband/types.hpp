#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <vector>

namespace prefband {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One interaction: a feature vector with ‖x‖ ≤ 1 and a binary outcome.
/// Construction rejects violations instead of renormalizing.
class Observation {
 public:
  Observation(Vector features, int outcome);

  const Vector& features() const { return features_; }
  int outcome() const { return outcome_; }
  Eigen::Index dim() const { return features_.size(); }

 private:
  Vector features_;
  int outcome_;
};

using Dataset = std::vector<Observation>;

/// Parameter vector θ together with the model constants: the ball radius S
/// of Θ = {‖θ‖ ≤ S} and the L2 regularization weight λ. Membership in Θ is
/// checked, never forced — the MLE itself is unconstrained.
struct ModelParams {
  Vector theta;
  double norm_bound;
  double reg_weight;

  ModelParams(Vector theta_in, double norm_bound_in, double reg_weight_in);

  Eigen::Index dim() const { return theta.size(); }
  bool in_param_ball(double tol = 1e-12) const { return theta.norm() <= norm_bound + tol; }
};

/// Design Hessian Σ σ̇(xᵀθ)xxᵀ + λI evaluated at a specific point.
/// Symmetric within 1e-12 componentwise; minimum eigenvalue ≥ λ − 1e-9.
/// Carries its Cholesky factorization so metric norms are solves, not
/// explicit inverses.
class HessianMatrix {
 public:
  HessianMatrix(Matrix m, Vector eval_point, double reg_weight);

  const Matrix& matrix() const { return matrix_; }
  const Vector& eval_point() const { return eval_point_; }
  double reg_weight() const { return reg_weight_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::LLT<Matrix>& llt() const { return llt_; }

  /// log det of the matrix, from the Cholesky factor.
  double log_det() const;

 private:
  Matrix matrix_;
  Vector eval_point_;
  double reg_weight_;
  Eigen::LLT<Matrix> llt_;
};

/// ‖v‖_H = √(vᵀ H v).
double metric_norm(const HessianMatrix& h, const Vector& v);

/// ‖v‖_{H⁻¹} = √(vᵀ H⁻¹ v), computed through the Cholesky solve.
double inverse_metric_norm(const HessianMatrix& h, const Vector& v);

}  // namespace prefband
