#pragma once

// Line-delimited text formats:
//   LiDAR:      t x y z sensor_id
//   IMU:        t ax ay az gx gy gz
//   trajectory: t x y z qx qy qz qw   (w-last on disk, w-first in memory)

#include <string>
#include <vector>

#include "splio/imu_pipeline.hpp"
#include "splio/lidar_pipeline.hpp"

namespace splio {

struct TrajectoryRow {
  double t;
  Vec3 p;
  UnitQuat q;
};

using Trajectory = std::vector<TrajectoryRow>;

// All readers throw std::runtime_error naming the file and line on parse
// errors; writers throw on I/O failure.
std::vector<LidarPoint> read_lidar_log(const std::string& path);
void write_lidar_log(const std::string& path, const std::vector<LidarPoint>& points);

std::vector<ImuSample> read_imu_log(const std::string& path);
void write_imu_log(const std::string& path, const std::vector<ImuSample>& samples);

Trajectory read_trajectory(const std::string& path);
void write_trajectory(const std::string& path, const Trajectory& traj);

}  // namespace splio
