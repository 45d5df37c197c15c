#include "splio/eval.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace splio {

TrajectoryRow interpolate_trajectory(const Trajectory& traj, double t) {
  if (traj.empty() || t < traj.front().t || t > traj.back().t) {
    throw std::invalid_argument("trajectory interpolation: time outside range");
  }
  const auto it = std::lower_bound(
      traj.begin(), traj.end(), t,
      [](const TrajectoryRow& r, double tt) { return r.t < tt; });
  if (it == traj.begin()) return traj.front();
  const TrajectoryRow& b = *it;
  const TrajectoryRow& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  TrajectoryRow out;
  out.t = t;
  out.p = (1.0 - w) * a.p + w * b.p;
  Eigen::Quaterniond qa(a.q.w(), a.q.x(), a.q.y(), a.q.z());
  Eigen::Quaterniond qb(b.q.w(), b.q.x(), b.q.y(), b.q.z());
  const Eigen::Quaterniond qi = qa.slerp(w, qb);
  out.q = UnitQuat(qi.w(), qi.x(), qi.y(), qi.z());
  return out;
}

double evaluate_ape(const Trajectory& est, const Trajectory& gt, Alignment align) {
  if (est.empty() || gt.empty() || est.back().t < gt.front().t ||
      gt.back().t < est.front().t) {
    throw std::invalid_argument("evaluate_ape: trajectories do not overlap in time");
  }
  std::vector<Vec3> e_pts, g_pts;
  for (const auto& row : gt) {
    if (row.t < est.front().t || row.t > est.back().t) continue;
    e_pts.push_back(interpolate_trajectory(est, row.t).p);
    g_pts.push_back(row.p);
  }
  if (e_pts.empty()) {
    throw std::invalid_argument("evaluate_ape: no ground-truth timestamp in overlap");
  }
  if (align == Alignment::SE3) {
    Eigen::Matrix3Xd src(3, e_pts.size()), dst(3, g_pts.size());
    for (std::size_t i = 0; i < e_pts.size(); ++i) {
      src.col(i) = e_pts[i];
      dst.col(i) = g_pts[i];
    }
    const Eigen::Matrix4d tf = Eigen::umeyama(src, dst, /*with_scaling=*/false);
    const Mat3 r = tf.topLeftCorner<3, 3>();
    const Vec3 s = tf.topRightCorner<3, 1>();
    for (auto& p : e_pts) p = r * p + s;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < e_pts.size(); ++i) {
    sum += (e_pts[i] - g_pts[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(e_pts.size()));
}

RuntimeReport report_runtime(const std::vector<double>& per_batch_seconds,
                             double batch_span) {
  if (per_batch_seconds.empty()) {
    throw std::invalid_argument("report_runtime: empty timing list");
  }
  std::vector<double> sorted = per_batch_seconds;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&sorted](double q) {
    const double idx = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = idx - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  };
  RuntimeReport r;
  double sum = 0.0;
  for (double t : sorted) sum += t;
  r.mean = sum / static_cast<double>(sorted.size());
  r.p50 = quantile(0.5);
  r.p95 = quantile(0.95);
  r.max = sorted.back();
  r.xi = r.mean / batch_span;
  return r;
}

}  // namespace splio
