#include "splio/cli_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace splio {

RunMode parse_run_mode(const std::string& s) {
  if (s == "LO") return RunMode::LO;
  if (s == "LIO") return RunMode::LIO;
  if (s == "MLO") return RunMode::MLO;
  if (s == "MLIO") return RunMode::MLIO;
  throw std::invalid_argument("unknown mode '" + s + "' (expected LO|LIO|MLO|MLIO)");
}

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::LO: return "LO";
    case RunMode::LIO: return "LIO";
    case RunMode::MLO: return "MLO";
    default: return "MLIO";
  }
}

Dynamics parse_dynamics(const std::string& s) {
  if (s == "low") return Dynamics::Low;
  if (s == "high") return Dynamics::High;
  throw std::invalid_argument("unknown dynamics '" + s + "' (expected low|high)");
}

std::string to_string(Dynamics d) { return d == Dynamics::Low ? "low" : "high"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number '" + v + "' for key " + key);
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer '" + v + "' for key " + key);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean '" + v + "' for key " + key);
}

// "x y z qw qx qy qz"
Extrinsics to_extrinsics(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  double x, y, z, qw, qx, qy, qz;
  if (!(in >> x >> y >> z >> qw >> qx >> qy >> qz)) {
    throw std::invalid_argument("config: key " + key +
                                " expects 'x y z qw qx qy qz', got '" + v + "'");
  }
  Extrinsics e;
  e.s = Vec3(x, y, z);
  e.R = to_rotmat(UnitQuat(qw, qx, qy, qz));
  return e;
}

std::string extrinsics_str(const Extrinsics& e) {
  // recover the quaternion from the rotation matrix for round-trip dumping
  const Eigen::Quaterniond q(e.R);
  std::ostringstream out;
  out << e.s.x() << " " << e.s.y() << " " << e.s.z() << " " << q.w() << " " << q.x()
      << " " << q.y() << " " << q.z();
  return out.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  // [run]
  if (key == "run.mode") { mode = parse_run_mode(value); return; }
  if (key == "run.knot_frequency") {
    knot_frequency = to_double(key, value);
    if (knot_frequency <= 0.0) throw std::invalid_argument("config: knot_frequency must be > 0");
    return;
  }
  if (key == "run.batch_span") { batch_span = to_double(key, value); return; }
  if (key == "run.batch_max") { batch_max = to_int(key, value); return; }
  if (key == "run.n_max") { n_max = to_int(key, value); return; }
  if (key == "run.eps") { eps = to_double(key, value); return; }
  if (key == "run.traj_rate") { traj_rate = to_double(key, value); return; }
  if (key == "run.seed") { seed = static_cast<std::uint64_t>(to_int(key, value)); return; }
  // [estimator]
  if (key == "estimator.sigma_pos") { process.sigma_pos = to_double(key, value); return; }
  if (key == "estimator.sigma_delta") { process.sigma_delta = to_double(key, value); return; }
  if (key == "estimator.sigma_bias_acc") { process.sigma_bias_acc = to_double(key, value); return; }
  if (key == "estimator.sigma_bias_gyro") { process.sigma_bias_gyro = to_double(key, value); return; }
  if (key == "estimator.sigma_rw") { process.sigma_rw = to_double(key, value); return; }
  if (key == "estimator.init_sigma_pos") { init_sigma_pos = to_double(key, value); return; }
  if (key == "estimator.init_sigma_delta") { init_sigma_delta = to_double(key, value); return; }
  if (key == "estimator.init_sigma_bias") { init_sigma_bias = to_double(key, value); return; }
  if (key == "estimator.init_pose") {
    const Extrinsics e = to_extrinsics(key, value);
    init_position = e.s;
    const Eigen::Quaterniond q(e.R);
    init_orientation = UnitQuat(q.w(), q.x(), q.y(), q.z());
    return;
  }
  if (key == "estimator.gravity_align") { gravity_align = to_bool(key, value); return; }
  // [lidar]
  if (key == "lidar.leaf_size") { leaf_size = to_double(key, value); return; }
  if (key == "lidar.n_neighbors") { assoc.n_neighbors = to_int(key, value); return; }
  if (key == "lidar.plane_rms_max") { assoc.plane_rms_max = to_double(key, value); return; }
  if (key == "lidar.assoc_dist_max") { assoc.assoc_dist_max = to_double(key, value); return; }
  if (key == "lidar.plane_spread_min") { assoc.plane_spread_min = to_double(key, value); return; }
  if (key == "lidar.n_check") { assoc.n_check = to_int(key, value); return; }
  if (key == "lidar.check_max") { assoc.check_max = to_double(key, value); return; }
  if (key == "lidar.variance_threshold") { gate.variance_threshold = to_double(key, value); return; }
  if (key == "lidar.nsigma") { gate.nsigma = to_double(key, value); return; }
  if (key == "lidar.robust_k") { gate.robust_k = to_double(key, value); return; }
  if (key == "lidar.min_range") { min_range = to_double(key, value); return; }
  if (key == "lidar.max_range") { max_range = to_double(key, value); return; }
  if (key == "lidar.sigma") { sigma_lidar = to_double(key, value); return; }
  if (key == "lidar.map_cell") { map_cell = to_double(key, value); return; }
  if (key == "lidar.bootstrap_span") { bootstrap_span = to_double(key, value); return; }
  if (key == "lidar.map_growth") { map_growth = to_bool(key, value); return; }
  if (key == "lidar.record_decisions") { record_decisions = to_bool(key, value); return; }
  if (key.rfind("lidar.extrinsics", 0) == 0) {
    const int idx = to_int(key, key.substr(std::string("lidar.extrinsics").size()));
    if (idx < 0 || idx > 7) throw std::invalid_argument("config: extrinsics index out of range");
    if (idx >= static_cast<int>(extrinsics.size())) extrinsics.resize(idx + 1);
    extrinsics[static_cast<std::size_t>(idx)] = to_extrinsics(key, value);
    return;
  }
  // [imu]
  if (key == "imu.sigma_acc") { imu_noise.sigma_acc = to_double(key, value); return; }
  if (key == "imu.sigma_gyro") { imu_noise.sigma_gyro = to_double(key, value); return; }
  if (key == "imu.gravity_magnitude") { gravity_magnitude = to_double(key, value); return; }
  // [sim]
  if (key == "sim.duration") { sim_duration = to_double(key, value); return; }
  if (key == "sim.dynamics") { sim_dynamics = parse_dynamics(value); return; }
  if (key == "sim.points_per_sec") { sim_points_per_sec = to_double(key, value); return; }
  if (key == "sim.imu_rate") { sim_imu_rate = to_double(key, value); return; }
  if (key == "sim.outlier_fraction") { sim_outlier_fraction = to_double(key, value); return; }
  // [eval]
  if (key == "eval.ape_align") {
    if (value == "none") { ape_align = Alignment::None; return; }
    if (value == "se3") { ape_align = Alignment::SE3; return; }
    throw std::invalid_argument("config: bad alignment '" + value + "' (none|se3)");
  }
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

void RunConfig::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set(section.empty() ? key : section + "." + key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
}

void RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  parse(buf.str());
}

std::string RunConfig::dump() const {
  std::ostringstream o;
  o << "[run]\n";
  o << "mode = " << to_string(mode) << "\n";
  o << "knot_frequency = " << knot_frequency << "\n";
  o << "batch_span = " << batch_span << "\n";
  o << "batch_max = " << batch_max << "\n";
  o << "n_max = " << n_max << "\n";
  o << "eps = " << eps << "\n";
  o << "traj_rate = " << traj_rate << "\n";
  o << "seed = " << seed << "\n";
  o << "\n[estimator]\n";
  o << "sigma_pos = " << process.sigma_pos << "\n";
  o << "sigma_delta = " << process.sigma_delta << "\n";
  o << "sigma_bias_acc = " << process.sigma_bias_acc << "\n";
  o << "sigma_bias_gyro = " << process.sigma_bias_gyro << "\n";
  o << "sigma_rw = " << process.sigma_rw << "\n";
  o << "init_sigma_pos = " << init_sigma_pos << "\n";
  o << "init_sigma_delta = " << init_sigma_delta << "\n";
  o << "init_sigma_bias = " << init_sigma_bias << "\n";
  o << "init_pose = " << init_position.x() << " " << init_position.y() << " "
    << init_position.z() << " " << init_orientation.w() << " " << init_orientation.x()
    << " " << init_orientation.y() << " " << init_orientation.z() << "\n";
  o << "gravity_align = " << (gravity_align ? "true" : "false") << "\n";
  o << "\n[lidar]\n";
  o << "leaf_size = " << leaf_size << "\n";
  o << "n_neighbors = " << assoc.n_neighbors << "\n";
  o << "plane_rms_max = " << assoc.plane_rms_max << "\n";
  o << "assoc_dist_max = " << assoc.assoc_dist_max << "\n";
  o << "plane_spread_min = " << assoc.plane_spread_min << "\n";
  o << "n_check = " << assoc.n_check << "\n";
  o << "check_max = " << assoc.check_max << "\n";
  o << "variance_threshold = " << gate.variance_threshold << "\n";
  o << "nsigma = " << gate.nsigma << "\n";
  o << "robust_k = " << gate.robust_k << "\n";
  o << "min_range = " << min_range << "\n";
  o << "max_range = " << max_range << "\n";
  o << "sigma = " << sigma_lidar << "\n";
  o << "map_cell = " << map_cell << "\n";
  o << "bootstrap_span = " << bootstrap_span << "\n";
  o << "map_growth = " << (map_growth ? "true" : "false") << "\n";
  o << "record_decisions = " << (record_decisions ? "true" : "false") << "\n";
  for (std::size_t i = 0; i < extrinsics.size(); ++i) {
    o << "extrinsics" << i << " = " << extrinsics_str(extrinsics[i]) << "\n";
  }
  o << "\n[imu]\n";
  o << "sigma_acc = " << imu_noise.sigma_acc << "\n";
  o << "sigma_gyro = " << imu_noise.sigma_gyro << "\n";
  o << "gravity_magnitude = " << gravity_magnitude << "\n";
  o << "\n[sim]\n";
  o << "duration = " << sim_duration << "\n";
  o << "dynamics = " << to_string(sim_dynamics) << "\n";
  o << "points_per_sec = " << sim_points_per_sec << "\n";
  o << "imu_rate = " << sim_imu_rate << "\n";
  o << "outlier_fraction = " << sim_outlier_fraction << "\n";
  o << "\n[eval]\n";
  o << "ape_align = " << (ape_align == Alignment::SE3 ? "se3" : "none") << "\n";
  return o.str();
}

}  // namespace splio
