#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace prefband {

/// Deterministic random stream with counter-based derivation.
///
/// Streams are derived from a master seed plus an integer path
/// (e.g. {trial, step}), so independent trials and replicates can run
/// in any order, or in parallel, and still reproduce bit-for-bit.
/// All draws go through splitmix64 output directly; nothing here
/// depends on implementation-defined std distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ kPhi)) {}

  static RngStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix(master ^ kPhi);
    for (std::uint64_t p : path) h = mix(h ^ mix(p + kPhi));
    return RngStream(h);
  }

  std::uint64_t next_u64() {
    state_ += kPhi;
    return mix(state_);
  }

  /// Uniform draw in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::int64_t uniform_int(std::int64_t n) {
    return static_cast<std::int64_t>(uniform() * static_cast<double>(n)) % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (one value per pair of uniforms).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index d) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  /// Uniform direction on the unit sphere in R^d.
  Eigen::VectorXd unit_sphere(Eigen::Index d) {
    Eigen::VectorXd v = gaussian_vector(d);
    double n = v.norm();
    while (n < 1e-12) {
      v = gaussian_vector(d);
      n = v.norm();
    }
    return v / n;
  }

  /// Uniform draw in the closed ball of the given radius.
  Eigen::VectorXd ball(Eigen::Index d, double radius) {
    double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(d));
    return r * unit_sphere(d);
  }

 private:
  static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t state_;
};

}  // namespace prefband
