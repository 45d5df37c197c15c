#include "splio/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <memory>

namespace splio {

namespace {

Gaussian make_initial_state(const RunConfig& cfg, double t_first, const UnitQuat& r0) {
  SplineState st;
  st.with_biases = cfg.uses_imu();
  st.grid.tau = cfg.tau();
  st.grid.t0 = t_first - 3.0 * cfg.tau();
  st.grid.n = 4;
  for (auto& s : st.pos_rcp) s = cfg.init_position;
  st.r_anchor = r0;
  Gaussian g;
  g.mean = st;
  g.cov = MatrixXd::Zero(st.dim(), st.dim());
  g.cov.block<12, 12>(0, 0) =
      cfg.init_sigma_pos * cfg.init_sigma_pos * MatrixXd::Identity(12, 12);
  g.cov.block<12, 12>(12, 12) =
      cfg.init_sigma_delta * cfg.init_sigma_delta * MatrixXd::Identity(12, 12);
  if (st.with_biases) {
    g.cov.block<6, 6>(24, 24) =
        cfg.init_sigma_bias * cfg.init_sigma_bias * MatrixXd::Identity(6, 6);
  }
  return g;
}

}  // namespace

RunResult run_odometry(const RunConfig& cfg, std::vector<LidarPoint> lidar,
                       std::vector<ImuSample> imu) {
  if (lidar.empty()) {
    throw std::invalid_argument("run_odometry: empty point stream");
  }
  if (cfg.uses_imu() && imu.empty()) {
    throw std::invalid_argument("run_odometry: mode " + to_string(cfg.mode) +
                                " requires an inertial stream");
  }
  if (!cfg.uses_imu()) imu.clear();

  // ingest: range filter, extrinsics bounds, time ordering
  std::vector<LidarPoint> pts;
  pts.reserve(lidar.size());
  for (const auto& p : lidar) {
    const double range = p.p.norm();
    if (range < cfg.min_range || range > cfg.max_range) continue;
    if (p.sensor_id < 0 || p.sensor_id >= static_cast<int>(cfg.extrinsics.size())) {
      throw std::invalid_argument("run_odometry: point with sensor_id " +
                                  std::to_string(p.sensor_id) + " but only " +
                                  std::to_string(cfg.extrinsics.size()) +
                                  " extrinsics configured");
    }
    pts.push_back(p);
  }
  if (pts.empty()) {
    throw std::invalid_argument("run_odometry: no points within range limits");
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const LidarPoint& a, const LidarPoint& b) { return a.t < b.t; });
  std::stable_sort(imu.begin(), imu.end(),
                   [](const ImuSample& a, const ImuSample& b) { return a.t < b.t; });

  const Vec3 g_vec(0, 0, cfg.gravity_magnitude);
  double t_first = pts.front().t;
  if (!imu.empty()) t_first = std::min(t_first, imu.front().t);

  // initial orientation: configured, or roll/pitch from quasi-static
  // accelerometer means when an IMU is present
  UnitQuat r0 = cfg.init_orientation;
  if (cfg.uses_imu() && cfg.gravity_align) {
    Vec3 acc_mean = Vec3::Zero();
    int n = 0;
    for (const auto& s : imu) {
      if (s.t > t_first + 0.5) break;
      acc_mean += s.acc;
      ++n;
    }
    if (n > 0) r0 = orientation_from_gravity(acc_mean / n, g_vec);
  }

  const double tau = cfg.tau();

  // seed the map from the earliest points at the initial pose; the filter
  // starts after this bootstrap window
  LocalMap map(cfg.map_cell);
  const double t_boot = t_first + cfg.bootstrap_span;
  std::size_t li = 0;
  {
    std::vector<LidarPoint> boot;
    while (li < pts.size() && pts[li].t < t_boot) boot.push_back(pts[li++]);
    for (const auto& p : voxel_downsample(boot, cfg.leaf_size)) {
      const auto& ext = cfg.extrinsics[static_cast<std::size_t>(p.sensor_id)];
      map.insert(r0.rotate(ext.R * p.p + ext.s) + cfg.init_position);
    }
  }
  std::size_t ii = 0;
  while (ii < imu.size() && imu[ii].t < t_boot) ++ii;
  if (li >= pts.size()) {
    throw std::invalid_argument("run_odometry: no points after the bootstrap span");
  }

  // anchor the knot grid at the first filtered measurement so no empty
  // prediction steps inflate the covariance before the first update
  double t_start = pts[li].t;
  if (ii < imu.size()) t_start = std::min(t_start, imu[ii].t);
  Gaussian posterior = make_initial_state(cfg, t_start, r0);

  FinalizedTrajectory finalized;
  finalized.init(posterior.mean.grid.t0, tau, 0, r0);

  RunResult result;
  RunReport& rep = result.report;
  rep.batch_span = cfg.batch_span;
  rep.n_points_in = static_cast<int>(pts.size());

  std::deque<LidarPoint> pending;  // processed points awaiting finalization
  std::vector<RetiredKnot> retired;
  const ProcessNoise zero_q{0.0, 0.0, 0.0, 0.0, 0.0};

  while (li < pts.size() || ii < imu.size()) {
    double t_next;
    if (li < pts.size() && (ii >= imu.size() || pts[li].t <= imu[ii].t)) {
      t_next = pts[li].t;
    } else {
      t_next = imu[ii].t;
    }
    retired.clear();
    Gaussian prior = predict(posterior, t_next, cfg.process, &retired);
    for (const auto& rk : retired) finalized.push(rk);

    const double window_end =
        std::min(t_next + cfg.batch_span, prior.mean.grid.t_latest());
    const auto t0_clock = std::chrono::steady_clock::now();

    std::vector<LidarPoint> raw;
    std::vector<ImuSample> batch_imu;
    int count = 0;
    while (count < cfg.batch_max && (li < pts.size() || ii < imu.size())) {
      const bool lidar_next =
          li < pts.size() && (ii >= imu.size() || pts[li].t <= imu[ii].t);
      const double t = lidar_next ? pts[li].t : imu[ii].t;
      if (t >= window_end) break;
      if (lidar_next) {
        raw.push_back(pts[li++]);
      } else {
        batch_imu.push_back(imu[ii++]);
      }
      ++count;
    }
    const std::vector<LidarPoint> used = voxel_downsample(raw, cfg.leaf_size);
    rep.n_points_used += static_cast<int>(used.size());

    std::vector<std::unique_ptr<MeasurementModel>> models;
    std::vector<LidarMeasurement*> lidar_models;
    models.reserve(used.size() + batch_imu.size());
    for (const auto& p : used) {
      auto m = std::make_unique<LidarMeasurement>(
          p, &cfg.extrinsics[static_cast<std::size_t>(p.sensor_id)], &map, &cfg.assoc,
          &cfg.gate, &prior.cov, cfg.sigma_lidar);
      lidar_models.push_back(m.get());
      models.push_back(std::move(m));
    }
    for (const auto& s : batch_imu) {
      models.push_back(std::make_unique<ImuMeasurement>(s, g_vec, cfg.imu_noise));
    }
    std::vector<MeasurementModel*> ptrs;
    ptrs.reserve(models.size());
    for (const auto& m : models) ptrs.push_back(m.get());

    posterior = iterated_update(prior, std::span<MeasurementModel* const>(ptrs),
                                cfg.n_max, cfg.eps, cfg.gate.robust_k);

    const auto t1_clock = std::chrono::steady_clock::now();
    rep.batch_seconds.push_back(
        std::chrono::duration<double>(t1_clock - t0_clock).count());
    ++rep.n_batches;

    for (const LidarMeasurement* m : lidar_models) {
      PointDecision::Kind kind;
      if (m->active()) {
        ++rep.n_active;
        kind = PointDecision::Kind::Active;
        const double res = point_residual(
            posterior.mean, m->point(),
            cfg.extrinsics[static_cast<std::size_t>(m->point().sensor_id)], m->fit());
        rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
      } else if (m->gated()) {
        ++rep.n_gated;
        kind = PointDecision::Kind::Gated;
      } else {
        ++rep.n_no_assoc;
        kind = PointDecision::Kind::NoAssociation;
      }
      if (cfg.record_decisions) {
        result.decisions.push_back({m->point().t, m->point().sensor_id, kind});
      }
    }

    if (cfg.map_growth) {
      for (const auto& p : used) pending.push_back(p);
      map_maintain(finalized, pending, cfg.extrinsics, map, 0.5 * cfg.leaf_size);
    }
  }

  // flush: retire the active window with zero process noise so the full
  // span becomes part of the finalized trajectory
  for (int i = 0; i < 4; ++i) {
    retired.clear();
    posterior = predict(posterior, posterior.mean.grid.t_latest(), zero_q, &retired);
    for (const auto& rk : retired) finalized.push(rk);
  }
  map_maintain(finalized, pending, cfg.extrinsics, map, 0.5 * cfg.leaf_size);
  rep.map_size = map.size();

  const double rate = cfg.traj_rate > 0.0 ? cfg.traj_rate : cfg.knot_frequency;
  for (std::int64_t k = 0;; ++k) {
    const double t = t_start + static_cast<double>(k) / rate;
    if (t >= finalized.watermark()) break;
    const auto [p, q] = finalized.pose(t);
    result.trajectory.push_back({t, p, q});
  }
  return result;
}

}  // namespace splio
