#pragma once

#include "prefband/logistic.hpp"
#include "prefband/rng.hpp"
#include "prefband/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace prefband::test {

/// Random instance with ‖x‖ ≤ 1 features and Bernoulli outcomes from a
/// planted parameter.
struct Instance {
  Dataset data;
  Vector theta_star;
  double reg_weight;
};

inline Instance random_instance(int d, int n, double reg_weight, RngStream& rng,
                                double theta_norm = 1.0) {
  Instance inst;
  inst.theta_star = theta_norm * rng.unit_sphere(d);
  inst.reg_weight = reg_weight;
  inst.data.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vector x = rng.uniform() * rng.unit_sphere(d);  // norms spread over (0,1]
    inst.data.emplace_back(x, rng.bernoulli(sigmoid(x.dot(inst.theta_star))) ? 1 : 0);
  }
  return inst;
}

/// Central finite difference of a scalar function.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& at,
                          double h = 1e-6) {
  Vector g(at.size());
  for (Eigen::Index k = 0; k < at.size(); ++k) {
    Vector hi = at;
    Vector lo = at;
    hi[k] += h;
    lo[k] -= h;
    g[k] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

/// Central finite difference of a vector function (Jacobian columns).
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& at,
                          double h = 1e-6) {
  const Vector f0 = f(at);
  Matrix j(f0.size(), at.size());
  for (Eigen::Index k = 0; k < at.size(); ++k) {
    Vector hi = at;
    Vector lo = at;
    hi[k] += h;
    lo[k] -= h;
    j.col(k) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return j;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace prefband::test
