#pragma once

// Inertial measurement model: predicted accelerometer/gyroscope readings
// from the spline (specific force plus gravity rotated into the body frame,
// body angular velocity), additive bias states, and the stacked Jacobian.

#include "splio/estimator.hpp"

namespace splio {

struct ImuSample {
  double t = 0.0;
  Vec3 acc = Vec3::Zero();   // m/s^2, body frame
  Vec3 gyro = Vec3::Zero();  // rad/s, body frame
};

/// Plausibility guard against wire corruption; true if the sample is finite
/// and within physical magnitude bounds.
bool imu_sample_plausible(const ImuSample& s);

/// Predicted measurement h = [R(t)^T (acc_world(t) + g) + b_acc;
///                            omega(t) + b_gyro].
Eigen::Matrix<double, 6, 1> imu_predict(const SplineState& state, double t,
                                        const Vec3& g);

/// 6 x dim Jacobian of imu_predict w.r.t. the filter state.
MatrixXd imu_jacobian(const SplineState& state, double t, const Vec3& g);

/// Initial body orientation from a quasi-static mean accelerometer reading:
/// returns r with R(r)^T g = mean_acc-direction * |g| (roll/pitch only, yaw
/// left at zero).
UnitQuat orientation_from_gravity(const Vec3& mean_acc, const Vec3& g);

struct ImuNoise {
  double sigma_acc = 0.05;    // m/s^2
  double sigma_gyro = 0.005;  // rad/s
};

/// One IMU sample as six stacked measurement rows.
class ImuMeasurement : public MeasurementModel {
 public:
  ImuMeasurement(ImuSample s, Vec3 g, ImuNoise noise)
      : s_(s), g_(g), noise_(noise) {}

  VectorXd residual(const SplineState& state) const override;
  MatrixXd jacobian(const SplineState& state) const override;
  VectorXd noise_var() const override;

  const ImuSample& sample() const { return s_; }

 private:
  ImuSample s_;
  Vec3 g_;
  ImuNoise noise_;
};

}  // namespace splio
