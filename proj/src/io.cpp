#include "splio/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace splio {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int lineno, const char* what) {
  std::ostringstream msg;
  msg << path << ":" << lineno << ": " << what;
  throw std::runtime_error(msg.str());
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

bool skippable(const std::string& line) {
  return line.empty() || line[0] == '#';
}

}  // namespace

std::vector<LidarPoint> read_lidar_log(const std::string& path) {
  auto in = open_in(path);
  std::vector<LidarPoint> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream ls(line);
    LidarPoint p;
    if (!(ls >> p.t >> p.p.x() >> p.p.y() >> p.p.z() >> p.sensor_id)) {
      parse_fail(path, lineno, "expected 't x y z sensor_id'");
    }
    if (!std::isfinite(p.t) || !p.p.allFinite()) {
      parse_fail(path, lineno, "non-finite value");
    }
    out.push_back(p);
  }
  return out;
}

void write_lidar_log(const std::string& path, const std::vector<LidarPoint>& points) {
  auto out = open_out(path);
  for (const auto& p : points) {
    out << p.t << " " << p.p.x() << " " << p.p.y() << " " << p.p.z() << " "
        << p.sensor_id << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<ImuSample> read_imu_log(const std::string& path) {
  auto in = open_in(path);
  std::vector<ImuSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream ls(line);
    ImuSample s;
    if (!(ls >> s.t >> s.acc.x() >> s.acc.y() >> s.acc.z() >> s.gyro.x() >> s.gyro.y() >>
          s.gyro.z())) {
      parse_fail(path, lineno, "expected 't ax ay az gx gy gz'");
    }
    if (!imu_sample_plausible(s)) {
      parse_fail(path, lineno, "implausible sample (corrupted record?)");
    }
    out.push_back(s);
  }
  return out;
}

void write_imu_log(const std::string& path, const std::vector<ImuSample>& samples) {
  auto out = open_out(path);
  for (const auto& s : samples) {
    out << s.t << " " << s.acc.x() << " " << s.acc.y() << " " << s.acc.z() << " "
        << s.gyro.x() << " " << s.gyro.y() << " " << s.gyro.z() << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Trajectory read_trajectory(const std::string& path) {
  auto in = open_in(path);
  Trajectory out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream ls(line);
    double t, x, y, z, qx, qy, qz, qw;
    if (!(ls >> t >> x >> y >> z >> qx >> qy >> qz >> qw)) {
      parse_fail(path, lineno, "expected 't x y z qx qy qz qw'");
    }
    if (!out.empty() && t <= out.back().t) {
      parse_fail(path, lineno, "timestamps must be strictly increasing");
    }
    out.push_back({t, Vec3(x, y, z), UnitQuat(qw, qx, qy, qz)});
  }
  return out;
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  for (const auto& r : traj) {
    out << r.t << " " << r.p.x() << " " << r.p.y() << " " << r.p.z() << " " << r.q.x()
        << " " << r.q.y() << " " << r.q.z() << " " << r.q.w() << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace splio
