#include "splio/capi.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "splio/eval.hpp"
#include "splio/io.hpp"
#include "splio/runner.hpp"
#include "splio/simulator.hpp"

namespace {

thread_local std::string g_last_error = "no error";

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return SPLIO_OK;
  } catch (const splio::EstimatorError& e) {
    g_last_error = e.what();
    return SPLIO_ERR_ESTIMATOR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPLIO_ERR_INPUT;
  }
}

int require(bool ok, const char* what) {
  if (!ok) g_last_error = what;
  return ok ? SPLIO_OK : SPLIO_ERR_INPUT;
}

}  // namespace

struct splio_config {
  splio::RunConfig cfg;
};

struct splio_result {
  splio::RunResult res;
};

extern "C" {

const char* splio_last_error(void) { return g_last_error.c_str(); }

splio_config* splio_config_create(void) { return new splio_config{}; }

void splio_config_destroy(splio_config* cfg) { delete cfg; }

int splio_config_load(splio_config* cfg, const char* path) {
  if (int rc = require(cfg && path, "config_load: NULL argument")) return rc;
  return guarded([&] { cfg->cfg.load(path); });
}

int splio_config_set(splio_config* cfg, const char* key, const char* value) {
  if (int rc = require(cfg && key && value, "config_set: NULL argument")) return rc;
  return guarded([&] { cfg->cfg.set(key, value); });
}

char* splio_config_dump(const splio_config* cfg) {
  if (!cfg) {
    g_last_error = "config_dump: NULL config";
    return nullptr;
  }
  const std::string s = cfg->cfg.dump();
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void splio_string_free(char* s) { delete[] s; }

int splio_simulate(const splio_config* cfg, const char* const* lidar_paths,
                   int n_lidar, const char* imu_path, const char* gt_path) {
  if (int rc = require(cfg && lidar_paths && n_lidar > 0,
                       "simulate: need a config and at least one output path")) {
    return rc;
  }
  return guarded([&] {
    const splio::RunConfig& c = cfg->cfg;
    if (n_lidar > static_cast<int>(c.extrinsics.size())) {
      throw std::invalid_argument("simulate: more output streams than extrinsics");
    }
    const splio::TruthSpline truth =
        splio::gen_truth(c.seed, c.sim_duration, c.sim_dynamics);
    const splio::PlaneWorld world = splio::make_room_world();
    const double t0 = truth.t_start();
    const double t1 = t0 + c.sim_duration;

    for (int i = 0; i < n_lidar; ++i) {
      splio::ScanPattern pat;
      pat.kind = i == 0 ? splio::ScanPattern::Kind::Spinning
                        : splio::ScanPattern::Kind::QuasiRandom;
      pat.points_per_sec = c.sim_points_per_sec;
      splio::RaycastConfig rc;
      rc.sigma = c.sigma_lidar;
      rc.min_range = c.min_range;
      rc.max_range = c.max_range;
      rc.outlier_fraction = c.sim_outlier_fraction;
      const auto scan =
          splio::raycast(world, truth, pat, c.extrinsics[static_cast<std::size_t>(i)],
                         t0, t1, rc, c.seed + 1 + static_cast<std::uint64_t>(i), i);
      splio::write_lidar_log(lidar_paths[i], scan.points);
    }

    if (imu_path) {
      splio::ImuSynthConfig ic;
      ic.rate = c.sim_imu_rate;
      ic.sigma_acc = c.imu_noise.sigma_acc;
      ic.sigma_gyro = c.imu_noise.sigma_gyro;
      ic.g = splio::Vec3(0, 0, c.gravity_magnitude);
      splio::write_imu_log(imu_path,
                           splio::synth_imu(truth, t0, t1, ic, c.seed + 100));
    }

    if (gt_path) {
      const double rate = c.traj_rate > 0.0 ? c.traj_rate : c.knot_frequency;
      // express ground truth in the start-pose frame: the estimate's frame is
      // anchored at its initial pose, so the two are directly comparable
      const auto [p0, q0] = truth.pose(t0);
      const splio::UnitQuat q0_inv = q0.conjugate();
      splio::Trajectory gt;
      for (std::int64_t k = 0;; ++k) {
        const double t = t0 + static_cast<double>(k) / rate;
        if (t >= t1) break;
        const auto [p, q] = truth.pose(t);
        gt.push_back({t, q0_inv.rotate(p - p0), q0_inv * q});
      }
      splio::write_trajectory(gt_path, gt);
    }
  });
}

int splio_run(const splio_config* cfg, const char* const* lidar_paths, int n_lidar,
              const char* imu_path, splio_result** out) {
  if (int rc = require(cfg && lidar_paths && n_lidar > 0 && out,
                       "run: need a config, point logs, and a result slot")) {
    return rc;
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<splio::LidarPoint> pts;
    for (int i = 0; i < n_lidar; ++i) {
      auto part = splio::read_lidar_log(lidar_paths[i]);
      pts.insert(pts.end(), part.begin(), part.end());
    }
    std::vector<splio::ImuSample> imu;
    if (imu_path) imu = splio::read_imu_log(imu_path);
    auto res = std::make_unique<splio_result>();
    res->res = splio::run_odometry(cfg->cfg, std::move(pts), std::move(imu));
    *out = res.release();
  });
}

void splio_result_destroy(splio_result* res) { delete res; }

int splio_result_report(const splio_result* res, splio_report* out) {
  if (int rc = require(res && out, "result_report: NULL argument")) return rc;
  return guarded([&] {
    const splio::RunReport& r = res->res.report;
    *out = splio_report{};
    out->n_batches = r.n_batches;
    out->n_points_in = r.n_points_in;
    out->n_points_used = r.n_points_used;
    out->n_active = r.n_active;
    out->n_gated = r.n_gated;
    out->n_no_assoc = r.n_no_assoc;
    out->map_size = r.map_size;
    out->max_abs_residual = r.max_abs_residual;
    if (!r.batch_seconds.empty()) {
      const splio::RuntimeReport rt =
          splio::report_runtime(r.batch_seconds, r.batch_span);
      out->xi = rt.xi;
      out->mean_seconds = rt.mean;
      out->p50_seconds = rt.p50;
      out->p95_seconds = rt.p95;
      out->max_seconds = rt.max;
    }
  });
}

int splio_result_write_trajectory(const splio_result* res, const char* path) {
  if (int rc = require(res && path, "write_trajectory: NULL argument")) return rc;
  return guarded([&] { splio::write_trajectory(path, res->res.trajectory); });
}

int splio_evaluate_ape(const char* est_path, const char* gt_path, int align_se3,
                       double* ape_out) {
  if (int rc = require(est_path && gt_path && ape_out, "evaluate_ape: NULL argument")) {
    return rc;
  }
  return guarded([&] {
    const splio::Trajectory est = splio::read_trajectory(est_path);
    const splio::Trajectory gt = splio::read_trajectory(gt_path);
    *ape_out = splio::evaluate_ape(
        est, gt, align_se3 ? splio::Alignment::SE3 : splio::Alignment::None);
  });
}

}  // extern "C"
