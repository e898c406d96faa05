#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "l0scope/types.hpp"

namespace l0scope {

/// Deterministic random source. Distributions are derived from raw mt19937_64
/// output with explicit formulas, so a given seed reproduces the same stream
/// on every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw from [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform draw from [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Matrix normal_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  /// Uniform draw from the closed Euclidean ball of the given radius.
  Vector uniform_in_ball(Index n, double radius) {
    Vector dir = normal_vector(n);
    const double nrm = dir.norm();
    if (nrm == 0.0) return Vector::Zero(n);
    const double scale = radius * std::pow(uniform01(), 1.0 / static_cast<double>(n));
    return dir * (scale / nrm);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace l0scope
