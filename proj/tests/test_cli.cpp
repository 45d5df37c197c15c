#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "splio/cli_config.hpp"
#include "splio/eval.hpp"
#include "splio/io.hpp"
#include "test_util.hpp"

using namespace splio;
using namespace splio::test;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config parse, set, and dump round trip") {
  RunConfig cfg;
  cfg.parse("[run]\nmode = LIO\nknot_frequency = 50\n\n[lidar]\nleaf_size = 0.4\n"
            "# a comment\nextrinsics1 = 0.1 0 0  1 0 0 0\n");
  CHECK(cfg.mode == RunMode::LIO);
  CHECK(cfg.knot_frequency == 50.0);
  CHECK(cfg.tau() == doctest::Approx(0.02));
  CHECK(cfg.leaf_size == 0.4);
  CHECK(cfg.extrinsics[1].s.x() == doctest::Approx(0.1));

  // dump -> parse reproduces every value
  RunConfig back;
  back.parse(cfg.dump());
  CHECK(back.dump() == cfg.dump());

  CHECK_THROWS_AS(cfg.set("run.nonsense", "1"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("run.knot_frequency", "-5"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("run.mode", "XYZ"), std::invalid_argument);
  RunConfig bad;
  CHECK_THROWS_WITH_AS(bad.parse("[run]\nmode LIO\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
}

TEST_CASE("lidar and imu log round trips with diagnostics") {
  const std::string lp = temp_path("splio_test_lidar.txt");
  std::vector<LidarPoint> pts = {{0.25, Vec3(1.5, -2.25, 0.125), 0},
                                 {0.5, Vec3(0.1, 0.2, 0.3), 1}};
  write_lidar_log(lp, pts);
  const auto rl = read_lidar_log(lp);
  REQUIRE(rl.size() == 2);
  CHECK(rl[1].sensor_id == 1);
  CHECK((rl[0].p - pts[0].p).norm() == 0.0);

  const std::string ip = temp_path("splio_test_imu.txt");
  std::vector<ImuSample> imu = {{0.25, Vec3(0, 0, 9.81), Vec3(0.1, 0, 0)}};
  write_imu_log(ip, imu);
  const auto ri = read_imu_log(ip);
  REQUIRE(ri.size() == 1);
  CHECK((ri[0].gyro - imu[0].gyro).norm() == 0.0);

  // parse error carries file and line
  std::ofstream bad(lp);
  bad << "0.1 1 2 3 0\nnot a record\n";
  bad.close();
  CHECK_THROWS_WITH_AS(read_lidar_log(lp), doctest::Contains(":2:"),
                       std::runtime_error);
  std::remove(lp.c_str());
  std::remove(ip.c_str());
}

TEST_CASE("trajectory round trip preserves poses and detects disorder") {
  auto g = rng(80);
  Trajectory traj;
  for (int i = 0; i < 50; ++i) {
    traj.push_back({0.1 * i, random_vec3(g, 5.0), random_quat(g)});
  }
  const std::string tp = temp_path("splio_test_traj.txt");
  write_trajectory(tp, traj);
  const auto back = read_trajectory(tp);
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(std::abs(back[i].t - traj[i].t) < 1e-15);
    CHECK((back[i].p - traj[i].p).norm() < 1e-15);
    // on-disk order is w-last; memory order w-first, up to sign
    CHECK(std::min((back[i].q.coeffs() - traj[i].q.coeffs()).norm(),
                   (back[i].q.coeffs() + traj[i].q.coeffs()).norm()) < 1e-15);
  }
  std::ofstream bad(tp);
  bad << "1 0 0 0 0 0 0 1\n0.5 0 0 0 0 0 0 1\n";
  bad.close();
  CHECK_THROWS_AS(read_trajectory(tp), std::runtime_error);
  std::remove(tp.c_str());
}

TEST_CASE("evaluate_ape trivial and alignment cases") {
  auto g = rng(81);
  Trajectory gt;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.05 * i;
    gt.push_back({t, Vec3(std::sin(t), std::cos(0.7 * t), 0.1 * t), random_quat(g)});
  }
  CHECK(evaluate_ape(gt, gt, Alignment::None) == doctest::Approx(0.0));

  Trajectory shifted = gt;
  for (auto& r : shifted) r.p += Vec3(0.1, 0, 0);
  CHECK(evaluate_ape(shifted, gt, Alignment::None) == doctest::Approx(0.1).epsilon(1e-12));

  // a rigid transform is recovered exactly by SE3 alignment
  const UnitQuat rq = random_quat(g);
  const Vec3 tv = random_vec3(g, 3.0);
  Trajectory transformed = gt;
  for (auto& r : transformed) r.p = to_rotmat(rq) * r.p + tv;
  CHECK(evaluate_ape(transformed, gt, Alignment::SE3) < 1e-9);

  // denser estimate than ground truth: interpolation at gt timestamps
  Trajectory sparse_gt = {gt[10], gt[20], gt[40]};
  CHECK(evaluate_ape(gt, sparse_gt, Alignment::None) < 1e-12);

  Trajectory disjoint = {{1000.0, Vec3::Zero(), UnitQuat()},
                         {1001.0, Vec3::Zero(), UnitQuat()}};
  CHECK_THROWS_AS(evaluate_ape(disjoint, gt, Alignment::None), std::invalid_argument);
}

TEST_CASE("interpolate_trajectory is linear in position") {
  Trajectory traj = {{0.0, Vec3(0, 0, 0), UnitQuat()},
                     {1.0, Vec3(2, 0, 0), UnitQuat()}};
  CHECK((interpolate_trajectory(traj, 0.25).p - Vec3(0.5, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(interpolate_trajectory(traj, 1.5), std::invalid_argument);
}

TEST_CASE("report_runtime percentiles and xi") {
  CHECK(report_runtime({0.0014, 0.0014, 0.0014}, 0.01).xi ==
        doctest::Approx(0.14).epsilon(1e-12));
  CHECK(report_runtime({0.01}, 0.01).xi == doctest::Approx(1.0));
  const auto r = report_runtime({0.001, 0.002, 0.003, 0.004, 0.005}, 0.01);
  CHECK(r.p50 == doctest::Approx(0.003));
  CHECK(r.max == doctest::Approx(0.005));
  CHECK(r.mean == doctest::Approx(0.003));
  CHECK_THROWS_AS(report_runtime({}, 0.01), std::invalid_argument);
}
