#pragma once

// Deterministic data generator: smooth 6-DoF ground-truth trajectories on a
// dense spline, a plane-patch world with LiDAR raycasting at exact per-point
// timestamps, and IMU synthesis — the labeled oracle for end-to-end tests.

#include <cstdint>
#include <random>
#include <vector>

#include "splio/imu_pipeline.hpp"
#include "splio/lidar_pipeline.hpp"

namespace splio {

enum class Dynamics { Low, High };

/// Ground-truth trajectory: a cubic spline on its own (finer) knot grid,
/// built from seeded sinusoid mixtures ramped up from rest and rescaled to
/// hit the dynamics class's peak speed / angular-rate targets.
class TruthSpline {
 public:
  double t_start() const { return grid_.knot_time(3); }
  double t_end() const { return grid_.t_latest(); }

  std::pair<Vec3, UnitQuat> pose(double t) const;
  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;
  Vec3 angular_velocity_body(double t) const;

  const KnotGrid& grid() const { return grid_; }
  const std::vector<Vec3>& control_positions() const { return pos_; }
  const std::vector<UnitQuat>& control_quats() const { return quats_; }

 private:
  friend TruthSpline gen_truth(std::uint64_t seed, double duration, Dynamics dyn);
  std::pair<PositionSegment, OrientationSegment> segment_at(double t, double& u) const;

  KnotGrid grid_;
  std::vector<Vec3> pos_;        // control points 0..n
  std::vector<UnitQuat> quats_;  // control orientations 0..n
  std::vector<Vec3> deltas_;     // deltas_[i] = Log(q_{i}^{-1} q_{i+1}), 0..n-1
};

/// Deterministic trajectory generation; `High` reaches peak speeds >= 3 m/s
/// and angular rates >= 3 rad/s, `Low` stays <= 1 m/s and <= 0.5 rad/s.
TruthSpline gen_truth(std::uint64_t seed, double duration, Dynamics dyn);

/// A bounded planar patch: anchored at `point`, normal `n`, spanned by the
/// orthonormal axes (u, v) with the given half-extents.
struct PlanePatch {
  Vec3 point;
  Vec3 n;
  Vec3 u, v;
  double half_u, half_v;
};

struct PlaneWorld {
  std::vector<PlanePatch> patches;

  /// Nearest patch intersection along origin + s*dir for s in
  /// [min_range, max_range]; returns the range or a negative value on miss.
  double intersect(const Vec3& origin, const Vec3& dir, double min_range,
                   double max_range, int* patch_index = nullptr) const;
};

/// A 12 x 12 x 8 m closed room (x,y in [-6,6], z in [-4,4]) with a few
/// interior panels for geometric variety.
PlaneWorld make_room_world();

struct ScanPattern {
  enum class Kind { Spinning, QuasiRandom };
  Kind kind = Kind::Spinning;
  double points_per_sec = 20000.0;
  int rings = 32;
  double spin_hz = 10.0;

  double time_of(std::int64_t k) const { return static_cast<double>(k) / points_per_sec; }
  Vec3 direction(std::int64_t k) const;  // unit ray, sensor frame
};

struct RaycastConfig {
  double sigma = 0.0;            // range noise std, m
  double min_range = 0.3;
  double max_range = 60.0;
  double outlier_fraction = 0.0; // labeled gross outliers, offset 1..4 m
};

struct RaycastResult {
  std::vector<LidarPoint> points;
  std::vector<std::uint8_t> is_outlier;  // parallel to points
};

/// Casts pattern rays from the interpolated pose at each ray's own
/// timestamp over [t0, t1); misses are dropped.
RaycastResult raycast(const PlaneWorld& world, const TruthSpline& truth,
                      const ScanPattern& pattern, const Extrinsics& ext,
                      double t0, double t1, const RaycastConfig& cfg,
                      std::uint64_t seed, int sensor_id = 0);

struct ImuSynthConfig {
  double rate = 400.0;  // Hz
  Vec3 b_acc = Vec3::Zero();
  Vec3 b_gyro = Vec3::Zero();
  double sigma_acc = 0.0;
  double sigma_gyro = 0.0;
  Vec3 g = Vec3(0, 0, 9.81);
};

std::vector<ImuSample> synth_imu(const TruthSpline& truth, double t0, double t1,
                                 const ImuSynthConfig& cfg, std::uint64_t seed);

}  // namespace splio
