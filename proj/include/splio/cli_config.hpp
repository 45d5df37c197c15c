#pragma once

// Run configuration: one human-readable key-value file with [section]s,
// every default embedded here and printable via dump().

#include <string>
#include <vector>

#include "splio/estimator.hpp"
#include "splio/eval.hpp"
#include "splio/imu_pipeline.hpp"
#include "splio/lidar_pipeline.hpp"
#include "splio/simulator.hpp"

namespace splio {

enum class RunMode { LO, LIO, MLO, MLIO };

RunMode parse_run_mode(const std::string& s);  // throws std::invalid_argument
std::string to_string(RunMode m);
Dynamics parse_dynamics(const std::string& s);  // "low" | "high"
std::string to_string(Dynamics d);

struct RunConfig {
  // [run]
  RunMode mode = RunMode::LO;
  double knot_frequency = 100.0;  // Hz
  double batch_span = 0.01;       // s
  int batch_max = 300;
  int n_max = 5;
  double eps = 1e-3;
  double traj_rate = 0.0;  // Hz; 0 = sample at the knot rate
  std::uint64_t seed = 1;

  // [estimator]
  ProcessNoise process;
  // sized for a well-initialized start: the statistic H P Hᵀ + R of the first
  // batches must sit below the association variance threshold or the filter
  // never accepts a point and cannot converge
  double init_sigma_pos = 0.005;
  double init_sigma_delta = 0.002;
  double init_sigma_bias = 0.1;
  Vec3 init_position = Vec3::Zero();
  UnitQuat init_orientation;
  bool gravity_align = true;  // overrides init_orientation when an IMU is present

  // [lidar]
  double leaf_size = 0.25;
  AssociationConfig assoc;
  LidarGateConfig gate;
  double min_range = 0.3;
  double max_range = 60.0;
  double sigma_lidar = 0.02;   // measurement noise std, m
  // voxel-hash cell of the map index; a couple of leaf sizes keeps the
  // per-cell point lists short, which dominates k-NN query time
  double map_cell = 0.5;
  double bootstrap_span = 0.1;  // s of initial points used to seed the map
  // when false the map stays frozen at its bootstrap content; useful in a
  // fully pre-observed static environment, where points re-inserted from
  // estimated poses would only add scatter at the level of the pose error
  bool map_growth = true;
  bool record_decisions = false;
  std::vector<Extrinsics> extrinsics = {Extrinsics{}, Extrinsics{}};

  // [imu]
  ImuNoise imu_noise;
  double gravity_magnitude = 9.81;

  // [sim] — synthetic data generation; lidar.sigma / imu.sigma_* double as
  // the generator's noise levels
  double sim_duration = 10.0;  // s
  Dynamics sim_dynamics = Dynamics::Low;
  double sim_points_per_sec = 20000.0;
  double sim_imu_rate = 400.0;  // Hz
  double sim_outlier_fraction = 0.0;
  Alignment ape_align = Alignment::None;  // eval subcommand alignment

  double tau() const { return 1.0 / knot_frequency; }
  bool uses_imu() const { return mode == RunMode::LIO || mode == RunMode::MLIO; }
  bool multi_lidar() const { return mode == RunMode::MLO || mode == RunMode::MLIO; }

  /// Applies one `section.key = value` assignment; throws
  /// std::invalid_argument on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  /// Parses a config file body (sections, key = value, # comments).
  void parse(const std::string& text);
  void load(const std::string& path);  // throws std::runtime_error on I/O
  std::string dump() const;
};

}  // namespace splio
