#include "splio/lidar_pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace splio {

namespace {
constexpr int kKeyOffset = 1 << 20;  // voxel coords admitted in [-2^20, 2^20)
}

LocalMap::Key LocalMap::key_of(int ix, int iy, int iz) const {
  return (static_cast<Key>(ix + kKeyOffset) << 42) |
         (static_cast<Key>(iy + kKeyOffset) << 21) |
         static_cast<Key>(iz + kKeyOffset);
}

void LocalMap::cell_coords(const Vec3& p, int& ix, int& iy, int& iz) const {
  ix = static_cast<int>(std::floor(p.x() / cell_));
  iy = static_cast<int>(std::floor(p.y() / cell_));
  iz = static_cast<int>(std::floor(p.z() / cell_));
}

int LocalMap::insert(const Vec3& p) {
  int ix, iy, iz;
  cell_coords(p, ix, iy, iz);
  const int idx = static_cast<int>(points_.size());
  if (points_.empty()) {
    lo_[0] = hi_[0] = ix;
    lo_[1] = hi_[1] = iy;
    lo_[2] = hi_[2] = iz;
  } else {
    lo_[0] = std::min(lo_[0], ix); hi_[0] = std::max(hi_[0], ix);
    lo_[1] = std::min(lo_[1], iy); hi_[1] = std::max(hi_[1], iy);
    lo_[2] = std::min(lo_[2], iz); hi_[2] = std::max(hi_[2], iz);
  }
  points_.push_back(p);
  grid_[key_of(ix, iy, iz)].push_back(idx);
  return idx;
}

std::vector<int> LocalMap::knn(const Vec3& query, int k) const {
  k = std::min(k, size());
  if (k <= 0) return {};
  int cx, cy, cz;
  cell_coords(query, cx, cy, cz);
  int smax = 0;
  smax = std::max(smax, std::max(hi_[0] - cx, cx - lo_[0]));
  smax = std::max(smax, std::max(hi_[1] - cy, cy - lo_[1]));
  smax = std::max(smax, std::max(hi_[2] - cz, cz - lo_[2]));

  std::vector<std::pair<double, int>> best;
  best.reserve(4 * k);
  const auto scan_cell = [&](int ix, int iy, int iz) {
    const auto it = grid_.find(key_of(ix, iy, iz));
    if (it == grid_.end()) return;
    for (int idx : it->second) {
      best.emplace_back((points_[idx] - query).squaredNorm(), idx);
    }
  };

  for (int s = 0; s <= smax; ++s) {
    if (s == 0) {
      scan_cell(cx, cy, cz);
    } else {
      for (int dx = -s; dx <= s; ++dx) {
        for (int dy = -s; dy <= s; ++dy) {
          for (int dz = -s; dz <= s; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != s) continue;
            scan_cell(cx + dx, cy + dy, cz + dz);
          }
        }
      }
    }
    if (static_cast<int>(best.size()) >= k) {
      std::sort(best.begin(), best.end());
      best.resize(k);
      // Any point in shell s+1 lies at least s*cell away from the query.
      const double bound = s * cell_;
      if (best.back().first <= bound * bound) break;
    }
  }
  std::sort(best.begin(), best.end());
  if (static_cast<int>(best.size()) > k) best.resize(k);
  std::vector<int> out;
  out.reserve(best.size());
  for (const auto& [d2, idx] : best) out.push_back(idx);
  return out;
}

std::vector<LidarPoint> voxel_downsample(const std::vector<LidarPoint>& points,
                                         double leaf) {
  std::unordered_map<std::int64_t, int> winner;  // voxel key -> index in points
  const auto voxel_key = [leaf](const Vec3& p) {
    const auto c = [leaf](double v) {
      return static_cast<std::int64_t>(std::floor(v / leaf)) + kKeyOffset;
    };
    return (c(p.x()) << 42) | (c(p.y()) << 21) | c(p.z());
  };
  const auto centroid_dist2 = [leaf](const Vec3& p) {
    Vec3 center;
    for (int i = 0; i < 3; ++i) {
      center[i] = (std::floor(p[i] / leaf) + 0.5) * leaf;
    }
    return (p - center).squaredNorm();
  };
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const auto key = voxel_key(points[i].p);
    const auto it = winner.find(key);
    if (it == winner.end() ||
        centroid_dist2(points[i].p) < centroid_dist2(points[it->second].p)) {
      winner[key] = i;
    }
  }
  std::vector<LidarPoint> out;
  out.reserve(winner.size());
  for (const auto& [key, idx] : winner) out.push_back(points[idx]);
  std::sort(out.begin(), out.end(),
            [](const LidarPoint& a, const LidarPoint& b) { return a.t < b.t; });
  return out;
}

PlaneFit fit_plane(const std::vector<Vec3>& pts) {
  PlaneFit fit;
  if (pts.size() < 3) return fit;
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Mat3 scatter = Mat3::Zero();
  for (const auto& p : pts) {
    const Vec3 d = p - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  fit.n = eig.eigenvectors().col(0).normalized();
  fit.rms = std::sqrt(std::max(0.0, eig.eigenvalues()[0]) /
                      static_cast<double>(pts.size()));
  fit.spread = std::sqrt(std::max(0.0, eig.eigenvalues()[1]) /
                         static_cast<double>(pts.size()));
  fit.valid = true;
  return fit;
}

PlaneFit associate(const Vec3& p_world, const LocalMap& map,
                   const AssociationConfig& cfg) {
  PlaneFit fit;
  const std::vector<int> nn = map.knn(p_world, cfg.n_neighbors + cfg.n_check);
  if (static_cast<int>(nn.size()) < cfg.n_neighbors) return fit;
  std::vector<Vec3> pts;
  pts.reserve(cfg.n_neighbors);
  double max_dist = 0.0;
  for (int i = 0; i < cfg.n_neighbors; ++i) {
    pts.push_back(map.point(nn[i]));
    max_dist = std::max(max_dist, (pts.back() - p_world).norm());
  }
  if (max_dist >= cfg.assoc_dist_max) return fit;
  fit = fit_plane(pts);
  fit.anchor = map.point(nn.front());
  fit.valid = fit.valid && fit.rms < cfg.plane_rms_max &&
              fit.spread > cfg.plane_spread_min;
  if (fit.valid) {
    const Vec3 centroid_ref = fit.anchor;  // any on-plane reference works
    const double probe_tol = std::max(cfg.check_max, 4.0 * fit.rms);
    for (int i = cfg.n_neighbors; i < static_cast<int>(nn.size()); ++i) {
      const Vec3& q = map.point(nn[i]);
      if ((q - p_world).norm() >= cfg.assoc_dist_max) break;
      if (std::abs(fit.n.dot(q - centroid_ref)) > probe_tol) {
        fit.valid = false;
        break;
      }
    }
  }
  return fit;
}

double point_residual(const SplineState& state, const LidarPoint& pt,
                      const Extrinsics& ext, const PlaneFit& fit) {
  const double u = active_u(state, pt.t);
  const Vec3 p_body = ext.R * pt.p + ext.s;
  const Vec3 pos = position_eval(state.pos_segment(), u, state.grid.tau, 0);
  const UnitQuat r = orientation_eval(state.ori_segment(), u);
  return fit.n.dot(r.rotate(p_body) + pos - fit.anchor);
}

Eigen::RowVectorXd point_jacobian(const SplineState& state, const LidarPoint& pt,
                                  const Extrinsics& ext, const PlaneFit& fit) {
  const double u = active_u(state, pt.t);
  const Vec3 p_body = ext.R * pt.p + ext.s;
  const UnitQuat r = orientation_eval(state.ori_segment(), u);
  Eigen::RowVectorXd h = Eigen::RowVectorXd::Zero(state.dim());
  h.segment<12>(0) =
      fit.n.transpose() * position_kinematics_matrix(u, state.grid.tau, 0);
  h.segment<12>(12) = fit.n.transpose() * d_rotation_d_q(r, p_body) *
                      jac_orientation_wrt_deltas(state.ori_segment(), u);
  return h;
}

bool outlier_gate(const Eigen::RowVectorXd& h_row, const MatrixXd& p_prior,
                  double r_var, double threshold) {
  const double stat = (h_row * p_prior * h_row.transpose())(0, 0) + r_var;
  return stat < threshold;
}

void LidarMeasurement::prepare(const SplineState& state) {
  active_ = false;
  gated_ = false;
  const double u = active_u(state, pt_.t);
  const Vec3 p_body = ext_->R * pt_.p + ext_->s;
  const Vec3 pos = position_eval(state.pos_segment(), u, state.grid.tau, 0);
  const UnitQuat r = orientation_eval(state.ori_segment(), u);
  const Vec3 p_world = r.rotate(p_body) + pos;
  fit_ = associate(p_world, *map_, *assoc_);
  if (!fit_.valid) return;
  // a sloppy plane fit is a noisier constraint; fold its rms into the
  // measurement variance so such points cannot dominate the update
  var_eff_ = var_ + fit_.rms * fit_.rms;
  const Eigen::RowVectorXd h = point_jacobian(state, pt_, *ext_, fit_);
  const double stat = (h * (*prior_cov_) * h.transpose())(0, 0) + var_eff_;
  if (stat >= gate_->variance_threshold) {
    gated_ = true;
    return;
  }
  const double res = fit_.n.dot(p_world - fit_.anchor);
  if (res * res > gate_->nsigma * gate_->nsigma * stat) {
    gated_ = true;
    return;
  }
  active_ = true;
}

VectorXd LidarMeasurement::residual(const SplineState& state) const {
  VectorXd r(1);
  r[0] = -point_residual(state, pt_, *ext_, fit_);  // z = 0 on the plane
  return r;
}

MatrixXd LidarMeasurement::jacobian(const SplineState& state) const {
  return point_jacobian(state, pt_, *ext_, fit_);
}

VectorXd LidarMeasurement::noise_var() const {
  VectorXd v(1);
  v[0] = var_eff_ > 0.0 ? var_eff_ : var_;
  return v;
}

void map_maintain(const FinalizedTrajectory& finalized, std::deque<LidarPoint>& pending,
                  const std::vector<Extrinsics>& extrinsics, LocalMap& map,
                  double merge_radius, std::vector<Vec3>* world_log) {
  const double merge2 = merge_radius * merge_radius;
  while (!pending.empty() && pending.front().t < finalized.watermark()) {
    const LidarPoint pt = pending.front();
    pending.pop_front();
    if (!finalized.covers(pt.t)) continue;  // predates the finalized span
    const auto& ext = extrinsics[static_cast<std::size_t>(pt.sensor_id)];
    const auto [pos, r] = finalized.pose(pt.t);
    const Vec3 p_world = r.rotate(ext.R * pt.p + ext.s) + pos;
    if (merge2 > 0.0 && map.size() > 0) {
      const std::vector<int> nn = map.knn(p_world, 1);
      if (!nn.empty() && (map.point(nn[0]) - p_world).squaredNorm() < merge2) {
        continue;
      }
    }
    map.insert(p_world);
    if (world_log) world_log->push_back(p_world);
  }
}

}  // namespace splio
