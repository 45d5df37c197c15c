#pragma once

// Uniform cubic B-spline evaluation for 6-DoF trajectories: position with
// derivatives up to second order, cumulative quaternion orientation with
// body-frame angular velocity, and analytic Jacobians w.r.t. the four
// control points of the active segment.

#include <array>
#include <utility>

#include <Eigen/Core>

#include "splio/so3.hpp"

namespace splio {

using Mat312 = Eigen::Matrix<double, 3, 12>;
using Mat412 = Eigen::Matrix<double, 4, 12>;

/// Uniform knot grid. Knot i sits at t0 + i*tau; the state's latest knot has
/// index n, and the active segment is [t_{n-1}, t_n).
struct KnotGrid {
  double t0 = 0.0;
  double tau = 0.01;
  int n = 4;

  double knot_time(int i) const { return t0 + i * tau; }
  double t_latest() const { return knot_time(n); }
  double seg_start() const { return knot_time(n - 1); }
};

/// Four position control points of one segment, oldest first.
struct PositionSegment {
  std::array<Vec3, 4> s;
};

/// Orientation segment: base quaternion plus the four control-point
/// increments, oldest first. Increments must stay below pi in magnitude.
struct OrientationSegment {
  UnitQuat r_base;
  std::array<Vec3, 4> deltas;
};

/// Cubic B-spline basis matrix (blending weights = Omega * [1,u,u^2,u^3]^T).
const Mat4& basis_matrix();

/// Cumulative basis matrix (lambdas = Phi * [1,u,u^2,u^3]^T).
const Mat4& cumulative_basis_matrix();

/// Maps t to the normalized time u in [0,1) and the segment's knot index k,
/// meaning t lies in [t_{k-1}, t_k). Throws std::out_of_range outside
/// [t_0, t_n).
std::pair<double, int> normalized_time(double t, const KnotGrid& grid);

/// Powers-of-u vector [1,u,u^2,u^3] or its time derivative of given order,
/// including the 1/tau^order chain-rule factor.
Vec4 u_powers(double u, double tau, int order);

/// Position (order 0, m), velocity (1, m/s), or acceleration (2, m/s^2).
Vec3 position_eval(const PositionSegment& seg, double u, double tau, int order);

/// The 3x12 interpolation matrix so that position_eval equals
/// position_kinematics_matrix(u,tau,order) * stacked control points.
Mat312 position_kinematics_matrix(double u, double tau, int order);

/// Cumulative basis values (order 0) or their time derivatives (order 1,
/// 1/tau folded in), for the four segment control points, oldest first.
Vec4 cumulative_lambdas(double u, double tau, int order);

/// Quaternion value of the cumulative orientation spline.
UnitQuat orientation_eval(const OrientationSegment& seg, double u);

/// Body-frame angular velocity (rad/s) via the three-stage recursion.
Vec3 angular_velocity(const OrientationSegment& seg, double u, double tau);

/// 4x12 Jacobian of the orientation quaternion w.r.t. the four increments.
Mat412 jac_orientation_wrt_deltas(const OrientationSegment& seg, double u);

/// 3x12 Jacobian of the angular velocity w.r.t. the four increments.
Mat312 jac_angvel_wrt_deltas(const OrientationSegment& seg, double u, double tau);

}  // namespace splio
