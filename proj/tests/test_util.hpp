#pragma once

// Shared helpers for the test suites: deterministic random generators and
// central finite differences used as independent Jacobian oracles.

#include <functional>
#include <random>

#include <Eigen/Core>

#include "splio/so3.hpp"

namespace splio::test {

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline Vec3 random_vec3(std::mt19937_64& g, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return Vec3(d(g), d(g), d(g));
}

inline UnitQuat random_quat(std::mt19937_64& g) {
  std::normal_distribution<double> d(0.0, 1.0);
  return UnitQuat(d(g), d(g), d(g), d(g));
}

/// Rotation vector with magnitude uniform in (lo, hi), random direction.
inline Vec3 random_rotvec(std::mt19937_64& g, double lo, double hi) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 dir(n(g), n(g), n(g));
  dir.normalize();
  std::uniform_real_distribution<double> mag(lo, hi);
  return mag(g) * dir;
}

/// Central finite differences of a vector function of a vector argument.
inline Eigen::MatrixXd finite_difference(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(1.0, b.norm());
  return (a - b).norm() / scale;
}

}  // namespace splio::test
