#pragma once

// Trajectory evaluation (absolute position error RMSE with optional rigid
// alignment) and runtime-efficiency reporting.

#include <vector>

#include "splio/io.hpp"

namespace splio {

enum class Alignment { None, SE3 };

/// RMSE of the position error after interpolating `est` at the ground-truth
/// timestamps (linear position, spherical-linear orientation — only
/// position enters the metric). Throws std::invalid_argument when the time
/// ranges do not overlap.
double evaluate_ape(const Trajectory& est, const Trajectory& gt, Alignment align);

/// Pose of a trajectory at time t by interpolation between bracketing rows;
/// t must lie within [front.t, back.t].
TrajectoryRow interpolate_trajectory(const Trajectory& traj, double t);

struct RuntimeReport {
  double xi;    // mean processing time / batch span
  double mean;  // seconds
  double p50;
  double p95;
  double max;
};

/// Throws std::invalid_argument on an empty timing list.
RuntimeReport report_runtime(const std::vector<double>& per_batch_seconds,
                             double batch_span);

}  // namespace splio
