#include "splio/spline.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace splio {

namespace {

Mat4 make_basis() {
  Mat4 m;
  m << 1, -3, 3, -1,
       4,  0, -6,  3,
       1,  3,  3, -3,
       0,  0,  0,  1;
  return Mat4(m / 6.0);
}

Mat4 make_cumulative_basis() {
  Mat4 m;
  m << 6, 0,  0,  0,
       5, 3, -3,  1,
       1, 3,  3, -2,
       0, 0,  0,  1;
  return Mat4(m / 6.0);
}

void check_order(int order, int max_order) {
  if (order < 0 || order > max_order) {
    throw std::invalid_argument("spline: derivative order " + std::to_string(order) +
                                " not supported");
  }
}

void check_delta(const Vec3& d) {
  if (!(d.norm() < std::numbers::pi)) {
    throw std::domain_error("spline: orientation increment magnitude must stay below pi");
  }
}

}  // namespace

const Mat4& basis_matrix() {
  static const Mat4 m = make_basis();
  return m;
}

const Mat4& cumulative_basis_matrix() {
  static const Mat4 m = make_cumulative_basis();
  return m;
}

std::pair<double, int> normalized_time(double t, const KnotGrid& grid) {
  const double t_end = grid.t_latest();
  if (!(t >= grid.t0 && t < t_end)) {
    std::ostringstream msg;
    msg << "spline: time " << t << " outside valid span [" << grid.t0 << ", " << t_end
        << ")";
    throw std::out_of_range(msg.str());
  }
  int k = static_cast<int>(std::floor((t - grid.t0) / grid.tau)) + 1;
  if (k > grid.n) k = grid.n;  // guard round-off at the upper edge
  double u = (t - grid.knot_time(k - 1)) / grid.tau;
  if (u < 0.0) u = 0.0;
  if (u >= 1.0) u = std::nextafter(1.0, 0.0);
  return {u, k};
}

Vec4 u_powers(double u, double tau, int order) {
  check_order(order, 2);
  switch (order) {
    case 0:
      return Vec4(1.0, u, u * u, u * u * u);
    case 1:
      return Vec4(0.0, 1.0, 2.0 * u, 3.0 * u * u) / tau;
    default:
      return Vec4(0.0, 0.0, 2.0, 6.0 * u) / (tau * tau);
  }
}

Vec3 position_eval(const PositionSegment& seg, double u, double tau, int order) {
  const Vec4 w = basis_matrix() * u_powers(u, tau, order);
  return w[0] * seg.s[0] + w[1] * seg.s[1] + w[2] * seg.s[2] + w[3] * seg.s[3];
}

Mat312 position_kinematics_matrix(double u, double tau, int order) {
  const Vec4 w = basis_matrix() * u_powers(u, tau, order);
  Mat312 m = Mat312::Zero();
  for (int i = 0; i < 4; ++i) {
    m.block<3, 3>(0, 3 * i) = w[i] * Mat3::Identity();
  }
  return m;
}

Vec4 cumulative_lambdas(double u, double tau, int order) {
  check_order(order, 1);
  return cumulative_basis_matrix() * u_powers(u, tau, order);
}

UnitQuat orientation_eval(const OrientationSegment& seg, double u) {
  const Vec4 lam = cumulative_lambdas(u, 1.0, 0);
  UnitQuat r = seg.r_base;
  for (int i = 0; i < 4; ++i) {
    check_delta(seg.deltas[i]);
    r = r * exp_at_identity(lam[i] * seg.deltas[i]);
  }
  return r;
}

Vec3 angular_velocity(const OrientationSegment& seg, double u, double tau) {
  for (const auto& d : seg.deltas) check_delta(d);
  const Vec4 lam = cumulative_lambdas(u, 1.0, 0);
  const Vec4 lam_dot = cumulative_lambdas(u, tau, 1);
  const UnitQuat e2 = exp_at_identity(lam[2] * seg.deltas[2]);
  const UnitQuat e3 = exp_at_identity(lam[3] * seg.deltas[3]);
  // Note: with the half-angle exponential convention used here the
  // recursion carries unit weights lam_dot_i * delta_i.
  const Vec3 om1 = lam_dot[1] * seg.deltas[1];
  const Vec3 om2 = e2.conjugate().rotate(om1) + lam_dot[2] * seg.deltas[2];
  return e3.conjugate().rotate(om2) + lam_dot[3] * seg.deltas[3];
}

Mat412 jac_orientation_wrt_deltas(const OrientationSegment& seg, double u) {
  const Vec4 lam = cumulative_lambdas(u, 1.0, 0);
  std::array<UnitQuat, 4> e;
  for (int i = 0; i < 4; ++i) {
    check_delta(seg.deltas[i]);
    e[i] = exp_at_identity(lam[i] * seg.deltas[i]);
  }
  Mat412 jac;
  for (int i = 0; i < 4; ++i) {
    UnitQuat q_left = seg.r_base;
    for (int j = 0; j < i; ++j) q_left = q_left * e[j];
    UnitQuat q_right = UnitQuat::identity();
    for (int j = i + 1; j < 4; ++j) q_right = q_right * e[j];
    jac.block<4, 3>(0, 3 * i) = lam[i] * left_matrix(q_left) * right_matrix(q_right) *
                                d_exp_d_nu(lam[i] * seg.deltas[i]);
  }
  return jac;
}

Mat312 jac_angvel_wrt_deltas(const OrientationSegment& seg, double u, double tau) {
  for (const auto& d : seg.deltas) check_delta(d);
  const Vec4 lam = cumulative_lambdas(u, 1.0, 0);
  const Vec4 lam_dot = cumulative_lambdas(u, tau, 1);
  const UnitQuat e2 = exp_at_identity(lam[2] * seg.deltas[2]);
  const UnitQuat e3 = exp_at_identity(lam[3] * seg.deltas[3]);
  const Mat3 r2t = to_rotmat(e2.conjugate());
  const Mat3 r3t = to_rotmat(e3.conjugate());
  const Vec3 om1 = lam_dot[1] * seg.deltas[1];
  const Vec3 om2 = r2t * om1 + lam_dot[2] * seg.deltas[2];

  // J_i(v) = lam_i d(e^-1 v e)/de dExp(lam_i d_i) + lam_dot_i I
  const auto j_of = [&](int i, const UnitQuat& ei, const Vec3& v) -> Mat3 {
    return lam[i] * d_conjugation_d_q(ei, v) * d_exp_d_nu(lam[i] * seg.deltas[i]) +
           lam_dot[i] * Mat3::Identity();
  };

  Mat312 jac;
  jac.block<3, 3>(0, 0).setZero();
  jac.block<3, 3>(0, 3) = lam_dot[1] * r3t * r2t;
  jac.block<3, 3>(0, 6) = r3t * j_of(2, e2, om1);
  jac.block<3, 3>(0, 9) = j_of(3, e3, om2);
  return jac;
}

}  // namespace splio
