// Command-line front end: simulate | run | eval | bench | dump-config.
// Links against the C interface only.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splio/capi.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitEstimator = 2;

int exit_code(int rc) {
  switch (rc) {
    case SPLIO_OK: return kExitOk;
    case SPLIO_ERR_ESTIMATOR: return kExitEstimator;
    default: return kExitInput;
  }
}

int fail(int rc) {
  std::fprintf(stderr, "error: %s\n", splio_last_error());
  return exit_code(rc);
}

using ConfigPtr = std::unique_ptr<splio_config, decltype(&splio_config_destroy)>;

// Applies --config / --seed / --mode on top of the defaults.
ConfigPtr make_config(const std::string& config_path, const std::string& seed,
                      const std::string& mode, int& rc) {
  ConfigPtr cfg(splio_config_create(), &splio_config_destroy);
  rc = SPLIO_OK;
  if (!config_path.empty()) rc = splio_config_load(cfg.get(), config_path.c_str());
  if (rc == SPLIO_OK && !seed.empty()) {
    rc = splio_config_set(cfg.get(), "run.seed", seed.c_str());
  }
  if (rc == SPLIO_OK && !mode.empty()) {
    rc = splio_config_set(cfg.get(), "run.mode", mode.c_str());
  }
  return cfg;
}

std::vector<const char*> c_paths(const std::vector<std::string>& paths) {
  std::vector<const char*> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(p.c_str());
  return out;
}

void print_report(const splio_report& r) {
  std::printf("batches           %d\n", r.n_batches);
  std::printf("points in/used    %d / %d\n", r.n_points_in, r.n_points_used);
  std::printf("active/gated/none %d / %d / %d\n", r.n_active, r.n_gated,
              r.n_no_assoc);
  std::printf("map size          %d\n", r.map_size);
  std::printf("max |residual|    %.3e m\n", r.max_abs_residual);
  std::printf("runtime xi        %.3f (mean %.3f ms, p50 %.3f, p95 %.3f, max %.3f)\n",
              r.xi, r.mean_seconds * 1e3, r.p50_seconds * 1e3, r.p95_seconds * 1e3,
              r.max_seconds * 1e3);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"B-spline LiDAR(-inertial) odometry"};
  app.require_subcommand(1);

  std::string config_path, imu_path, gt_path, out_path, seed, mode;
  std::vector<std::string> lidar_paths;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file");
    sub->add_option("--seed", seed, "overrides run.seed");
    sub->add_option("--mode", mode, "overrides run.mode (LO|LIO|MLO|MLIO)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(sim);
  sim->add_option("--lidar", lidar_paths, "output point log, one per sensor")
      ->required();
  sim->add_option("--imu", imu_path, "output inertial log");
  sim->add_option("--gt", gt_path, "output ground-truth trajectory");

  CLI::App* run = app.add_subcommand("run", "run odometry on point/inertial logs");
  add_common(run);
  run->add_option("--lidar", lidar_paths, "input point log, repeatable")->required();
  run->add_option("--imu", imu_path, "input inertial log");
  run->add_option("--out", out_path, "output trajectory file");

  CLI::App* bench = app.add_subcommand("bench", "run odometry and report timing only");
  add_common(bench);
  bench->add_option("--lidar", lidar_paths, "input point log, repeatable")->required();
  bench->add_option("--imu", imu_path, "input inertial log");

  CLI::App* eval = app.add_subcommand("eval", "APE between estimate and ground truth");
  add_common(eval);
  eval->add_option("--out", out_path, "estimated trajectory file")->required();
  eval->add_option("--gt", gt_path, "ground-truth trajectory file")->required();

  CLI::App* dump = app.add_subcommand("dump-config", "print the effective config");
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  int rc = SPLIO_OK;
  ConfigPtr cfg = make_config(config_path, seed, mode, rc);
  if (rc != SPLIO_OK) return fail(rc);

  if (dump->parsed()) {
    char* text = splio_config_dump(cfg.get());
    if (!text) return fail(SPLIO_ERR_INPUT);
    std::fputs(text, stdout);
    splio_string_free(text);
    return kExitOk;
  }

  if (sim->parsed()) {
    const auto paths = c_paths(lidar_paths);
    rc = splio_simulate(cfg.get(), paths.data(), static_cast<int>(paths.size()),
                        imu_path.empty() ? nullptr : imu_path.c_str(),
                        gt_path.empty() ? nullptr : gt_path.c_str());
    if (rc != SPLIO_OK) return fail(rc);
    std::printf("wrote %zu point log(s)%s%s\n", paths.size(),
                imu_path.empty() ? "" : ", inertial log",
                gt_path.empty() ? "" : ", ground truth");
    return kExitOk;
  }

  if (run->parsed() || bench->parsed()) {
    const auto paths = c_paths(lidar_paths);
    splio_result* res = nullptr;
    rc = splio_run(cfg.get(), paths.data(), static_cast<int>(paths.size()),
                   imu_path.empty() ? nullptr : imu_path.c_str(), &res);
    if (rc != SPLIO_OK) return fail(rc);
    std::unique_ptr<splio_result, decltype(&splio_result_destroy)> owned(
        res, &splio_result_destroy);
    splio_report report{};
    rc = splio_result_report(res, &report);
    if (rc != SPLIO_OK) return fail(rc);
    print_report(report);
    if (run->parsed() && !out_path.empty()) {
      rc = splio_result_write_trajectory(res, out_path.c_str());
      if (rc != SPLIO_OK) return fail(rc);
    }
    return kExitOk;
  }

  // eval: alignment choice comes from the eval.ape_align config key.
  int align_se3 = 0;
  if (char* text = splio_config_dump(cfg.get())) {
    const std::string dump_text(text);
    splio_string_free(text);
    const auto pos = dump_text.find("ape_align");
    if (pos != std::string::npos &&
        dump_text.find("se3", pos) < dump_text.find('\n', pos)) {
      align_se3 = 1;
    }
  }
  double ape = 0.0;
  rc = splio_evaluate_ape(out_path.c_str(), gt_path.c_str(), align_se3, &ape);
  if (rc != SPLIO_OK) return fail(rc);
  std::printf("ape_rmse %.6e m\n", ape);
  return kExitOk;
}
