#include "splio/imu_pipeline.hpp"

#include <Eigen/Geometry>

namespace splio {

bool imu_sample_plausible(const ImuSample& s) {
  return std::isfinite(s.t) && s.acc.allFinite() && s.gyro.allFinite() &&
         s.acc.norm() < 200.0 && s.gyro.norm() < 100.0;
}

Eigen::Matrix<double, 6, 1> imu_predict(const SplineState& state, double t,
                                        const Vec3& g) {
  const double u = active_u(state, t);
  const double tau = state.grid.tau;
  const Vec3 acc_world = position_eval(state.pos_segment(), u, tau, 2);
  const UnitQuat r = orientation_eval(state.ori_segment(), u);
  Eigen::Matrix<double, 6, 1> h;
  h.head<3>() = r.conjugate().rotate(acc_world + g) + state.b_acc;
  h.tail<3>() = angular_velocity(state.ori_segment(), u, tau) + state.b_gyro;
  return h;
}

MatrixXd imu_jacobian(const SplineState& state, double t, const Vec3& g) {
  const double u = active_u(state, t);
  const double tau = state.grid.tau;
  const Vec3 acc_world = position_eval(state.pos_segment(), u, tau, 2);
  const UnitQuat r = orientation_eval(state.ori_segment(), u);
  const Mat3 rt = to_rotmat(r).transpose();
  const Mat412 dq = jac_orientation_wrt_deltas(state.ori_segment(), u);

  MatrixXd h = MatrixXd::Zero(6, state.dim());
  h.block<3, 12>(0, 0) = rt * position_kinematics_matrix(u, tau, 2);
  h.block<3, 12>(0, 12) = d_conjugation_d_q(r, acc_world + g) * dq;
  h.block<3, 12>(3, 12) = jac_angvel_wrt_deltas(state.ori_segment(), u, tau);
  if (state.with_biases) {
    h.block<3, 3>(0, 24).setIdentity();
    h.block<3, 3>(3, 27).setIdentity();
  }
  return h;
}

UnitQuat orientation_from_gravity(const Vec3& mean_acc, const Vec3& g) {
  // Want R(r)^T g = mean_acc, i.e. R maps the measured direction onto g.
  const Eigen::Quaterniond q =
      Eigen::Quaterniond::FromTwoVectors(mean_acc.normalized(), g.normalized());
  return UnitQuat(q.w(), q.x(), q.y(), q.z());
}

VectorXd ImuMeasurement::residual(const SplineState& state) const {
  Eigen::Matrix<double, 6, 1> z;
  z.head<3>() = s_.acc;
  z.tail<3>() = s_.gyro;
  return z - imu_predict(state, s_.t, g_);
}

MatrixXd ImuMeasurement::jacobian(const SplineState& state) const {
  return imu_jacobian(state, s_.t, g_);
}

VectorXd ImuMeasurement::noise_var() const {
  VectorXd v(6);
  v.head<3>().setConstant(noise_.sigma_acc * noise_.sigma_acc);
  v.tail<3>().setConstant(noise_.sigma_gyro * noise_.sigma_gyro);
  return v;
}

}  // namespace splio
