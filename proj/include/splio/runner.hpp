#pragma once

// End-to-end odometry driver: ingest -> downsample -> batch -> predict ->
// iterated update -> map maintenance, producing a finalized trajectory and
// a run report.

#include <vector>

#include "splio/cli_config.hpp"
#include "splio/eval.hpp"
#include "splio/io.hpp"

namespace splio {

struct PointDecision {
  enum class Kind { Active, Gated, NoAssociation };
  double t;
  int sensor_id;
  Kind kind;
};

struct RunReport {
  int n_batches = 0;
  double batch_span = 0.0;
  std::vector<double> batch_seconds;
  int n_points_in = 0;    // after range filtering
  int n_points_used = 0;  // after downsampling, presented to the filter
  int n_active = 0;
  int n_gated = 0;
  int n_no_assoc = 0;
  double max_abs_residual = 0.0;  // largest posterior point-to-plane residual, m
  int map_size = 0;
};

struct RunResult {
  Trajectory trajectory;
  RunReport report;
  // per-point gating decisions at the final filter iteration; filled only
  // when config.record_decisions is set
  std::vector<PointDecision> decisions;
};

/// Runs the full pipeline on in-memory streams. Throws std::invalid_argument
/// on inconsistent inputs and EstimatorError on filter failures.
RunResult run_odometry(const RunConfig& config, std::vector<LidarPoint> lidar,
                       std::vector<ImuSample> imu);

}  // namespace splio
