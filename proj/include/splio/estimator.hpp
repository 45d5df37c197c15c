#pragma once

// Recursive filtering on the spline control-point window: random-walk /
// knot-extension prediction, the modified iterated EKF update with both
// Kalman-gain forms, and the log of retired control points from which
// finalized trajectory spans are evaluated.

#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "splio/spline.hpp"

namespace splio {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Filter state: the four newest position control points, the four newest
/// orientation increments, optional IMU biases, plus the (non-estimated)
/// base quaternion and knot grid anchoring the active segment.
struct SplineState {
  std::array<Vec3, 4> pos_rcp{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 4> ori_deltas{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  Vec3 b_acc = Vec3::Zero();
  Vec3 b_gyro = Vec3::Zero();
  UnitQuat r_anchor;
  KnotGrid grid;
  bool with_biases = true;

  int dim() const { return with_biases ? 30 : 24; }
  VectorXd to_vector() const;
  void set_from_vector(const VectorXd& v);
  void add_delta(const VectorXd& dx);

  PositionSegment pos_segment() const { return PositionSegment{pos_rcp}; }
  OrientationSegment ori_segment() const { return OrientationSegment{r_anchor, ori_deltas}; }
};

struct Gaussian {
  SplineState mean;
  MatrixXd cov;
};

/// Process-noise configuration. Extension noise enters only the newly
/// created control point / increment and the bias blocks; sigma_rw drives
/// the (default zero) within-span random walk.
struct ProcessNoise {
  // sized to cover the constant-velocity extrapolation error of one knot
  // step; values far above that let weakly observed scan sectors drag the
  // newest control point around
  double sigma_pos = 0.005;     // m, new position control point
  double sigma_delta = 0.002;   // rad, new orientation increment
  double sigma_bias_acc = 1e-4;
  double sigma_bias_gyro = 1e-5;
  double sigma_rw = 0.0;

  MatrixXd extension_cov(bool with_biases) const;
  MatrixXd random_walk_cov(bool with_biases) const;
};

struct EstimatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One retired control point: knot index, frozen values, and the base
/// quaternion after folding the retired increment into it (= r at the
/// retired index).
struct RetiredKnot {
  int index;
  Vec3 pos;
  Vec3 delta;
  UnitQuat r_after;
};

/// Knot-extension transition matrix, block-diagonal over position window
/// shift, increment window shift, and (optionally) identity bias blocks.
MatrixXd extension_matrix(bool with_biases);

/// Prediction step. If t_z falls inside the active segment the state is a
/// random walk; otherwise knot extension repeats until t_z < t_n, retiring
/// the oldest control point each time (appended to `retired` if given).
Gaussian predict(const Gaussian& prior, double t_z, const ProcessNoise& q,
                 std::vector<RetiredKnot>* retired = nullptr);

/// Kalman gain, switching between the covariance form (measurement dim <=
/// state dim) and the information form with diagonal R otherwise.
MatrixXd kalman_gain(const MatrixXd& P, const MatrixXd& H, const VectorXd& r_diag);

/// One batch evaluation at the current iterate: stacked Jacobian, stacked
/// residual z - h, and the diagonal of the measurement noise covariance.
struct BatchEval {
  MatrixXd H;
  VectorXd residual;
  VectorXd noise_var;
  int rows() const { return static_cast<int>(residual.size()); }
};

using BatchEvaluator = std::function<BatchEval(const SplineState&)>;

/// A single measurement contributing rows to the stacked batch update.
/// prepare() runs once per filter iteration and may refresh data
/// association; a measurement reporting active() == false contributes
/// nothing this iteration.
class MeasurementModel {
 public:
  virtual ~MeasurementModel() = default;
  virtual void prepare(const SplineState&) {}
  virtual bool active() const { return true; }
  virtual VectorXd residual(const SplineState& state) const = 0;  // z - h
  virtual MatrixXd jacobian(const SplineState& state) const = 0;
  virtual VectorXd noise_var() const = 0;
};

/// Modified iterated EKF update. Iterates from the predicted prior until
/// the increment norm drops below eps or n_max iterations are reached;
/// posterior covariance is (I - KH) P, symmetrized.
///
/// If robust_k > 0 the span overload additionally reweights each iteration:
/// rows whose noise-whitened residual exceeds robust_k times the batch's
/// robust scale (median absolute deviation, floored at one standard
/// deviation) get their variance inflated by the squared excess. A few
/// rows inconsistent with the rest of the batch thus lose influence
/// quadratically, while a coherent innovation shared by the whole batch
/// raises the scale and passes through unweighted.
Gaussian iterated_update(const Gaussian& prior, const BatchEvaluator& eval, int n_max,
                         double eps);
Gaussian iterated_update(const Gaussian& prior, std::span<MeasurementModel* const> batch,
                         int n_max, double eps, double robust_k = 0.0);

/// Pose interpolated from the state's active segment.
std::pair<Vec3, UnitQuat> interpolate_pose(const SplineState& state, double t);

/// Normalized time within the state's active segment [t_{n-1}, t_n);
/// throws std::out_of_range elsewhere.
double active_u(const SplineState& state, double t);

/// Growing record of finalized control points; spans whose four control
/// points have all retired can be evaluated here independently of the
/// filter state.
class FinalizedTrajectory {
 public:
  /// anchor_index / anchor are the initial base quaternion r at that knot
  /// index; retired knots must then arrive with consecutive indices
  /// anchor_index+1, anchor_index+2, ...
  void init(double t0, double tau, int anchor_index, const UnitQuat& anchor);
  void push(const RetiredKnot& k);

  /// True if t lies in a span all of whose control points have retired.
  bool covers(double t) const;
  /// End of the covered span (start of the first non-finalized segment).
  double watermark() const;

  std::pair<Vec3, UnitQuat> pose(double t) const;
  std::pair<PositionSegment, OrientationSegment> segment(int k) const;

 private:
  double t0_ = 0.0;
  double tau_ = 0.01;
  int anchor_index_ = 0;
  std::vector<Vec3> pos_;      // index anchor_index_+1 ...
  std::vector<Vec3> delta_;
  std::vector<UnitQuat> quat_;  // index anchor_index_ ...
};

}  // namespace splio
