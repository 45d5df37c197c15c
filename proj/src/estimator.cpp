#include "splio/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace splio {

VectorXd SplineState::to_vector() const {
  VectorXd v(dim());
  for (int i = 0; i < 4; ++i) v.segment<3>(3 * i) = pos_rcp[i];
  for (int i = 0; i < 4; ++i) v.segment<3>(12 + 3 * i) = ori_deltas[i];
  if (with_biases) {
    v.segment<3>(24) = b_acc;
    v.segment<3>(27) = b_gyro;
  }
  return v;
}

void SplineState::set_from_vector(const VectorXd& v) {
  for (int i = 0; i < 4; ++i) pos_rcp[i] = v.segment<3>(3 * i);
  for (int i = 0; i < 4; ++i) ori_deltas[i] = v.segment<3>(12 + 3 * i);
  if (with_biases) {
    b_acc = v.segment<3>(24);
    b_gyro = v.segment<3>(27);
  }
}

void SplineState::add_delta(const VectorXd& dx) { set_from_vector(to_vector() + dx); }

MatrixXd ProcessNoise::extension_cov(bool with_biases) const {
  const int n = with_biases ? 30 : 24;
  MatrixXd q = MatrixXd::Zero(n, n);
  q.block<3, 3>(9, 9) = sigma_pos * sigma_pos * Mat3::Identity();
  q.block<3, 3>(21, 21) = sigma_delta * sigma_delta * Mat3::Identity();
  if (with_biases) {
    q.block<3, 3>(24, 24) = sigma_bias_acc * sigma_bias_acc * Mat3::Identity();
    q.block<3, 3>(27, 27) = sigma_bias_gyro * sigma_bias_gyro * Mat3::Identity();
  }
  return q;
}

MatrixXd ProcessNoise::random_walk_cov(bool with_biases) const {
  const int n = with_biases ? 30 : 24;
  return sigma_rw * sigma_rw * MatrixXd::Identity(n, n);
}

MatrixXd extension_matrix(bool with_biases) {
  const int n = with_biases ? 30 : 24;
  MatrixXd a = MatrixXd::Zero(n, n);
  const Mat3 id = Mat3::Identity();
  // position window shift, new point extrapolated from -s_{n-3} + 2 s_{n-1}
  a.block<3, 3>(0, 3) = id;
  a.block<3, 3>(3, 6) = id;
  a.block<3, 3>(6, 9) = id;
  a.block<3, 3>(9, 0) = -id;
  a.block<3, 3>(9, 6) = 2.0 * id;
  // increment window shift, new increment copies delta_{n-2}
  a.block<3, 3>(12, 15) = id;
  a.block<3, 3>(15, 18) = id;
  a.block<3, 3>(18, 21) = id;
  a.block<3, 3>(21, 15) = id;
  if (with_biases) {
    a.block<6, 6>(24, 24).setIdentity();
  }
  return a;
}

Gaussian predict(const Gaussian& prior, double t_z, const ProcessNoise& q,
                 std::vector<RetiredKnot>* retired) {
  const SplineState& s = prior.mean;
  // round-off guard: timestamps an ulp away from a knot must not flip segment
  const double tol = 1e-9 * s.grid.tau;
  if (t_z < s.grid.seg_start() - tol) {
    std::ostringstream msg;
    msg << "estimator: stale measurement at t=" << t_z << " before segment start "
        << s.grid.seg_start();
    throw EstimatorError(msg.str());
  }
  Gaussian out = prior;
  if (t_z < s.grid.t_latest() - tol) {
    const MatrixXd qrw = q.random_walk_cov(s.with_biases);
    if (q.sigma_rw > 0.0) out.cov += qrw;
    return out;
  }
  const MatrixXd a = extension_matrix(s.with_biases);
  const MatrixXd qe = q.extension_cov(s.with_biases);
  while (t_z >= out.mean.grid.t_latest() - tol) {
    SplineState& m = out.mean;
    RetiredKnot rk;
    rk.index = m.grid.n - 3;
    rk.pos = m.pos_rcp[0];
    rk.delta = m.ori_deltas[0];
    m.r_anchor = m.r_anchor * exp_at_identity(m.ori_deltas[0]);
    rk.r_after = m.r_anchor;
    const Vec3 new_pos = -m.pos_rcp[0] + 2.0 * m.pos_rcp[2];
    const Vec3 new_delta = m.ori_deltas[1];
    for (int i = 0; i < 3; ++i) {
      m.pos_rcp[i] = m.pos_rcp[i + 1];
      m.ori_deltas[i] = m.ori_deltas[i + 1];
    }
    m.pos_rcp[3] = new_pos;
    m.ori_deltas[3] = new_delta;
    m.grid.n += 1;
    out.cov = a * out.cov * a.transpose() + qe;
    if (retired) retired->push_back(rk);
  }
  return out;
}

namespace {

void check_spd_pivot(const Eigen::LDLT<MatrixXd>& ldlt, const char* what) {
  const VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  if (!(dmin > 0.0) || dmin < 1e-15 * dmax) {
    std::ostringstream msg;
    msg << "estimator: " << what << " numerically singular (pivot ratio "
        << (dmax > 0.0 ? dmin / dmax : 0.0) << ")";
    throw EstimatorError(msg.str());
  }
}

}  // namespace

MatrixXd kalman_gain(const MatrixXd& P, const MatrixXd& H, const VectorXd& r_diag) {
  const int m = static_cast<int>(H.rows());
  const int n = static_cast<int>(H.cols());
  if (P.rows() != n || P.cols() != n || r_diag.size() != m) {
    throw std::invalid_argument("kalman_gain: inconsistent dimensions");
  }
  if (m == 0) return MatrixXd::Zero(n, 0);
  if (m <= n) {
    MatrixXd s = H * P * H.transpose();
    s.diagonal() += r_diag;
    Eigen::LDLT<MatrixXd> ldlt(s);
    check_spd_pivot(ldlt, "innovation covariance");
    return ldlt.solve(H * P.transpose()).transpose();
  }
  // Information form, exploiting the diagonal measurement noise.
  const VectorXd r_inv = r_diag.cwiseInverse();
  Eigen::LDLT<MatrixXd> p_ldlt(P);
  check_spd_pivot(p_ldlt, "prior covariance");
  MatrixXd info = H.transpose() * r_inv.asDiagonal() * H +
                  p_ldlt.solve(MatrixXd::Identity(n, n));
  Eigen::LDLT<MatrixXd> info_ldlt(info);
  check_spd_pivot(info_ldlt, "information matrix");
  return info_ldlt.solve(H.transpose() * r_inv.asDiagonal());
}

Gaussian iterated_update(const Gaussian& prior, const BatchEvaluator& eval, int n_max,
                         double eps) {
  const int n = prior.mean.dim();
  const VectorXd x_prior = prior.mean.to_vector();
  SplineState iterate = prior.mean;
  MatrixXd last_h;
  MatrixXd k_last;
  bool updated = false;
  for (int j = 0; j < n_max; ++j) {
    BatchEval be = eval(iterate);
    if (be.rows() == 0) break;
    if (!be.residual.allFinite()) {
      throw std::invalid_argument("iterated_update: non-finite residual in batch");
    }
    const MatrixXd k = kalman_gain(prior.cov, be.H, be.noise_var);
    const VectorXd x_j = iterate.to_vector();
    const VectorXd dx =
        k * be.residual - (x_j - x_prior) + k * (be.H * (x_j - x_prior));
    iterate.add_delta(dx);
    last_h = std::move(be.H);
    k_last = k;
    updated = true;
    if (dx.norm() < eps) break;
  }
  if (!updated) return prior;
  Gaussian post;
  post.mean = iterate;
  MatrixXd p = (MatrixXd::Identity(n, n) - k_last * last_h) * prior.cov;
  post.cov = 0.5 * (p + p.transpose());
  return post;
}

Gaussian iterated_update(const Gaussian& prior, std::span<MeasurementModel* const> batch,
                         int n_max, double eps, double robust_k) {
  auto eval = [&batch, robust_k](const SplineState& state) {
    for (MeasurementModel* m : batch) m->prepare(state);
    int rows = 0;
    for (const MeasurementModel* m : batch) {
      if (m->active()) rows += static_cast<int>(m->noise_var().size());
    }
    BatchEval be;
    be.H = MatrixXd::Zero(rows, state.dim());
    be.residual = VectorXd::Zero(rows);
    be.noise_var = VectorXd::Zero(rows);
    int at = 0;
    int idx = 0;
    for (const MeasurementModel* m : batch) {
      if (m->active()) {
        const VectorXd r = m->residual(state);
        if (!r.allFinite()) {
          throw std::invalid_argument("iterated_update: non-finite residual from measurement " +
                                      std::to_string(idx));
        }
        const int nr = static_cast<int>(r.size());
        be.residual.segment(at, nr) = r;
        be.H.block(at, 0, nr, state.dim()) = m->jacobian(state);
        be.noise_var.segment(at, nr) = m->noise_var();
        at += nr;
      }
      ++idx;
    }
    if (robust_k > 0.0 && be.rows() > 0) {
      VectorXd w = be.residual.cwiseQuotient(be.noise_var.cwiseSqrt()).cwiseAbs();
      std::vector<double> sorted(w.data(), w.data() + w.size());
      const auto mid = sorted.begin() + sorted.size() / 2;
      std::nth_element(sorted.begin(), mid, sorted.end());
      const double scale = std::max(1.0, 1.4826 * *mid);
      const double cap = robust_k * scale;
      for (int i = 0; i < be.rows(); ++i) {
        if (w[i] > cap) {
          const double f = w[i] / cap;
          be.noise_var[i] *= f * f;
        }
      }
    }
    return be;
  };
  return iterated_update(prior, eval, n_max, eps);
}

double active_u(const SplineState& state, double t) {
  // bounds are checked on the timestamps themselves; the division below can
  // land an ulp outside [0, 1) for an in-range t, so the result is clamped
  const double tol = 1e-9 * state.grid.tau;
  if (t < state.grid.seg_start() - tol || t >= state.grid.t_latest()) {
    std::ostringstream msg;
    msg << "estimator: time " << t << " outside active segment ["
        << state.grid.seg_start() << ", " << state.grid.t_latest() << ")";
    throw std::out_of_range(msg.str());
  }
  const double u = (t - state.grid.seg_start()) / state.grid.tau;
  return std::clamp(u, 0.0, 1.0);
}

std::pair<Vec3, UnitQuat> interpolate_pose(const SplineState& state, double t) {
  const double u = active_u(state, t);
  return {position_eval(state.pos_segment(), u, state.grid.tau, 0),
          orientation_eval(state.ori_segment(), u)};
}

void FinalizedTrajectory::init(double t0, double tau, int anchor_index,
                               const UnitQuat& anchor) {
  t0_ = t0;
  tau_ = tau;
  anchor_index_ = anchor_index;
  pos_.clear();
  delta_.clear();
  quat_.assign(1, anchor);
}

void FinalizedTrajectory::push(const RetiredKnot& k) {
  const int expected = anchor_index_ + 1 + static_cast<int>(pos_.size());
  if (k.index != expected) {
    throw std::logic_error("FinalizedTrajectory: non-consecutive retired knot index");
  }
  pos_.push_back(k.pos);
  delta_.push_back(k.delta);
  quat_.push_back(k.r_after);
}

double FinalizedTrajectory::watermark() const {
  const int last = anchor_index_ + static_cast<int>(pos_.size());
  const int first_covered = anchor_index_ + 4;
  if (last < first_covered) return t0_ + (first_covered - 1) * tau_;
  return t0_ + last * tau_;
}

bool FinalizedTrajectory::covers(double t) const {
  const double start = t0_ + (anchor_index_ + 3) * tau_;
  return t >= start && t < watermark();
}

std::pair<PositionSegment, OrientationSegment> FinalizedTrajectory::segment(int k) const {
  const int last = anchor_index_ + static_cast<int>(pos_.size());
  if (k < anchor_index_ + 4 || k > last) {
    throw std::out_of_range("FinalizedTrajectory: segment not finalized");
  }
  PositionSegment ps;
  OrientationSegment os;
  os.r_base = quat_[k - 4 - anchor_index_];
  for (int i = 0; i < 4; ++i) {
    const int idx = k - 3 + i - (anchor_index_ + 1);
    ps.s[i] = pos_[idx];
    os.deltas[i] = delta_[idx];
  }
  return {ps, os};
}

std::pair<Vec3, UnitQuat> FinalizedTrajectory::pose(double t) const {
  if (!covers(t)) {
    std::ostringstream msg;
    msg << "FinalizedTrajectory: time " << t << " outside finalized span";
    throw std::out_of_range(msg.str());
  }
  int k = static_cast<int>(std::floor((t - t0_) / tau_)) + 1;
  const int last = anchor_index_ + static_cast<int>(pos_.size());
  if (k > last) k = last;
  if (k < anchor_index_ + 4) k = anchor_index_ + 4;
  double u = (t - (t0_ + (k - 1) * tau_)) / tau_;
  if (u < 0.0) u = 0.0;
  if (u > 1.0) u = 1.0;
  auto [ps, os] = segment(k);
  return {position_eval(ps, u, tau_, 0), orientation_eval(os, u)};
}

}  // namespace splio
