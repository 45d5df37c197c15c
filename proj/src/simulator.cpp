#include "splio/simulator.hpp"

#include <cmath>
#include <numbers>

namespace splio {

namespace {

// 50 Hz truth knots: deliberately a different grid than the estimator's
// default 100 Hz so the estimator cannot represent the truth exactly.
constexpr double kTruthTau = 0.02;

constexpr double kHoldSeconds = 0.5;  // exactly stationary start
constexpr double kRampSeconds = 1.0;

// Stationary hold followed by a C^2 quintic smoothstep from rest. The hold
// mirrors the usual practice of starting a recording at standstill and gives
// odometry a motion-free span to build its initial map from.
double ramp(double t) {
  if (t <= kHoldSeconds) return 0.0;
  if (t >= kHoldSeconds + kRampSeconds) return 1.0;
  const double x = (t - kHoldSeconds) / kRampSeconds;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

struct SinusoidMix {
  // three sinusoids per axis
  double amp[3][3];
  double freq[3][3];
  double phase[3][3];

  Vec3 eval(double t) const {
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
      double v = 0.0;
      for (int m = 0; m < 3; ++m) {
        v += amp[a][m] * std::sin(2.0 * std::numbers::pi * freq[a][m] * t + phase[a][m]);
      }
      out[a] = v;
    }
    return out;
  }
};

SinusoidMix random_mix(std::mt19937_64& g, double f_lo, double f_hi) {
  std::uniform_real_distribution<double> ad(0.5, 1.0), fd(f_lo, f_hi),
      pd(0.0, 2.0 * std::numbers::pi);
  SinusoidMix mix;
  for (int a = 0; a < 3; ++a) {
    for (int m = 0; m < 3; ++m) {
      mix.amp[a][m] = ad(g);
      mix.freq[a][m] = fd(g);
      mix.phase[a][m] = pd(g);
    }
  }
  return mix;
}

}  // namespace

std::pair<PositionSegment, OrientationSegment> TruthSpline::segment_at(double t,
                                                                       double& u) const {
  const auto [uu, k] = normalized_time(t, grid_);
  u = uu;
  PositionSegment ps;
  OrientationSegment os;
  os.r_base = quats_[static_cast<std::size_t>(k - 4)];
  for (int j = 0; j < 4; ++j) {
    ps.s[j] = pos_[static_cast<std::size_t>(k - 3 + j)];
    os.deltas[j] = deltas_[static_cast<std::size_t>(k - 4 + j)];
  }
  return {ps, os};
}

std::pair<Vec3, UnitQuat> TruthSpline::pose(double t) const {
  double u;
  const auto [ps, os] = segment_at(t, u);
  return {position_eval(ps, u, grid_.tau, 0), orientation_eval(os, u)};
}

Vec3 TruthSpline::velocity(double t) const {
  double u;
  const auto [ps, os] = segment_at(t, u);
  return position_eval(ps, u, grid_.tau, 1);
}

Vec3 TruthSpline::acceleration(double t) const {
  double u;
  const auto [ps, os] = segment_at(t, u);
  return position_eval(ps, u, grid_.tau, 2);
}

Vec3 TruthSpline::angular_velocity_body(double t) const {
  double u;
  const auto [ps, os] = segment_at(t, u);
  return angular_velocity(os, u, grid_.tau);
}

TruthSpline gen_truth(std::uint64_t seed, double duration, Dynamics dyn) {
  std::mt19937_64 g(seed);
  const bool high = dyn == Dynamics::High;
  const SinusoidMix pos_mix = random_mix(g, high ? 0.4 : 0.1, high ? 1.2 : 0.4);
  const SinusoidMix rot_mix = random_mix(g, high ? 0.4 : 0.1, high ? 1.2 : 0.4);
  std::uniform_real_distribution<double> od(-1.0, 1.0);
  const Vec3 p0(od(g), od(g), od(g));

  const double v_target = high ? 3.5 : 0.8;
  const double w_target = high ? 3.4 : 0.4;

  TruthSpline truth;
  truth.grid_.t0 = -3.0 * kTruthTau;
  truth.grid_.tau = kTruthTau;
  truth.grid_.n = 4 + static_cast<int>(std::ceil(duration / kTruthTau));

  const Vec3 pos_off = pos_mix.eval(0.0);
  const Vec3 rot_off = rot_mix.eval(0.0);
  double s_pos = 1.0, s_rot = 1.0;
  for (int pass = 0; pass < 4; ++pass) {
    truth.pos_.clear();
    truth.quats_.clear();
    truth.deltas_.clear();
    for (int i = 0; i <= truth.grid_.n; ++i) {
      const double t = truth.grid_.knot_time(i);
      const double e = ramp(t);
      truth.pos_.push_back(p0 + s_pos * e * (pos_mix.eval(t) - pos_off));
      truth.quats_.push_back(exp_at_identity(s_rot * e * (rot_mix.eval(t) - rot_off)));
      if (i > 0) {
        truth.deltas_.push_back(
            log_at_identity(truth.quats_[i - 1].conjugate() * truth.quats_[i]));
      }
    }
    // rescale amplitudes so sampled peaks hit the class targets
    double v_peak = 0.0, w_peak = 0.0;
    for (double t = truth.t_start(); t < truth.t_end(); t += 1e-3) {
      v_peak = std::max(v_peak, truth.velocity(t).norm());
      w_peak = std::max(w_peak, truth.angular_velocity_body(t).norm());
    }
    if (v_peak > 0.0) s_pos *= v_target / v_peak;
    if (w_peak > 0.0) s_rot *= w_target / w_peak;
  }
  return truth;
}

double PlaneWorld::intersect(const Vec3& origin, const Vec3& dir, double min_range,
                             double max_range, int* patch_index) const {
  double best = -1.0;
  int best_idx = -1;
  for (int i = 0; i < static_cast<int>(patches.size()); ++i) {
    const PlanePatch& p = patches[i];
    const double denom = p.n.dot(dir);
    if (std::abs(denom) < 1e-9) continue;
    const double s = p.n.dot(p.point - origin) / denom;
    if (s < min_range || s > max_range) continue;
    const Vec3 local = origin + s * dir - p.point;
    if (std::abs(p.u.dot(local)) > p.half_u || std::abs(p.v.dot(local)) > p.half_v) {
      continue;
    }
    if (best < 0.0 || s < best) {
      best = s;
      best_idx = i;
    }
  }
  if (patch_index) *patch_index = best_idx;
  return best;
}

namespace {

PlanePatch make_patch(const Vec3& point, const Vec3& normal, const Vec3& u_hint,
                      double half_u, double half_v) {
  PlanePatch p;
  p.point = point;
  p.n = normal.normalized();
  p.u = (u_hint - u_hint.dot(p.n) * p.n).normalized();
  p.v = p.n.cross(p.u);
  p.half_u = half_u;
  p.half_v = half_v;
  return p;
}

}  // namespace

PlaneWorld make_room_world() {
  PlaneWorld w;
  const Vec3 ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  w.patches.push_back(make_patch(Vec3(0, 0, -4), ez, ex, 6, 6));   // floor
  w.patches.push_back(make_patch(Vec3(0, 0, 4), -ez, ex, 6, 6));   // ceiling
  w.patches.push_back(make_patch(Vec3(-6, 0, 0), ex, ey, 6, 4));   // walls
  w.patches.push_back(make_patch(Vec3(6, 0, 0), -ex, ey, 6, 4));
  w.patches.push_back(make_patch(Vec3(0, -6, 0), ey, ex, 6, 4));
  w.patches.push_back(make_patch(Vec3(0, 6, 0), -ey, ex, 6, 4));
  // interior panels, some tilted, for geometric variety
  w.patches.push_back(make_patch(Vec3(3, -2, 0), Vec3(-1, 0.3, 0.1), ez, 1.5, 1.8));
  w.patches.push_back(make_patch(Vec3(-3, 3, -1), Vec3(0.6, -1, 0.2), ez, 1.8, 1.5));
  w.patches.push_back(make_patch(Vec3(0, -3.5, 1), Vec3(0.2, 1, -0.4), ex, 2.0, 1.2));
  w.patches.push_back(make_patch(Vec3(-2.5, -2.5, 2), Vec3(1, 1, -1), ex, 1.5, 1.5));
  return w;
}

Vec3 ScanPattern::direction(std::int64_t k) const {
  const double deg = std::numbers::pi / 180.0;
  double az, el;
  if (kind == Kind::Spinning) {
    const int ring = static_cast<int>(k % rings);
    el = (-15.0 + 30.0 * ring / (rings - 1)) * deg;
    az = 2.0 * std::numbers::pi * spin_hz * time_of(k);
  } else {
    // golden-angle style quasi-random coverage
    const double fa = std::fmod(static_cast<double>(k) * 0.61803398874989, 1.0);
    const double fe = std::fmod(static_cast<double>(k) * 0.38196601125011, 1.0);
    az = 2.0 * std::numbers::pi * fa;
    el = (-25.0 + 50.0 * fe) * deg;
  }
  return Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
}

RaycastResult raycast(const PlaneWorld& world, const TruthSpline& truth,
                      const ScanPattern& pattern, const Extrinsics& ext,
                      double t0, double t1, const RaycastConfig& cfg,
                      std::uint64_t seed, int sensor_id) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_real_distribution<double> offd(1.0, 4.0);
  RaycastResult out;
  for (std::int64_t k = 0;; ++k) {
    const double t = t0 + pattern.time_of(k);
    if (t >= t1) break;
    const auto [p, r] = truth.pose(t);
    const Mat3 rm = to_rotmat(r);
    const Vec3 d_sensor = pattern.direction(k);
    const Vec3 origin = p + rm * ext.s;
    const Vec3 d_world = rm * (ext.R * d_sensor);
    const double range = world.intersect(origin, d_world, cfg.min_range, cfg.max_range);
    if (range < 0.0) continue;
    double measured = range + (cfg.sigma > 0.0 ? cfg.sigma * nd(g) : 0.0);
    bool outlier = false;
    if (cfg.outlier_fraction > 0.0 && ud(g) < cfg.outlier_fraction) {
      measured += offd(g);
      outlier = true;
    }
    out.points.push_back({t, measured * d_sensor, sensor_id});
    out.is_outlier.push_back(outlier ? 1 : 0);
  }
  return out;
}

std::vector<ImuSample> synth_imu(const TruthSpline& truth, double t0, double t1,
                                 const ImuSynthConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<ImuSample> out;
  for (std::int64_t i = 0;; ++i) {
    const double t = t0 + static_cast<double>(i) / cfg.rate;
    if (t >= t1) break;
    const auto [p, r] = truth.pose(t);
    ImuSample s;
    s.t = t;
    s.acc = to_rotmat(r).transpose() * (truth.acceleration(t) + cfg.g) + cfg.b_acc;
    s.gyro = truth.angular_velocity_body(t) + cfg.b_gyro;
    if (cfg.sigma_acc > 0.0) {
      s.acc += cfg.sigma_acc * Vec3(nd(g), nd(g), nd(g));
    }
    if (cfg.sigma_gyro > 0.0) {
      s.gyro += cfg.sigma_gyro * Vec3(nd(g), nd(g), nd(g));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace splio
