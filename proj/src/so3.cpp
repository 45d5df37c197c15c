#include "splio/so3.hpp"

#include <cmath>

namespace splio {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Vec3 UnitQuat::rotate(const Vec3& v) const {
  const double w = c_[0];
  const Vec3 im = c_.tail<3>();
  return (w * w - im.squaredNorm()) * v + 2.0 * im.dot(v) * im + 2.0 * w * im.cross(v);
}

UnitQuat hamilton_product(const UnitQuat& a, const UnitQuat& b) {
  const double aw = a.w(), bw = b.w();
  const Vec3 av = a.vec(), bv = b.vec();
  Vec4 c;
  c[0] = aw * bw - av.dot(bv);
  c.tail<3>() = aw * bv + bw * av + av.cross(bv);
  return UnitQuat(c);
}

UnitQuat exp_at_identity(const Vec3& nu) {
  const double theta = nu.norm();
  Vec4 c;
  if (theta < 1e-8) {
    // 2-term Taylor of cos(t/2) and sin(t/2)/t
    c[0] = 1.0 - theta * theta / 8.0;
    c.tail<3>() = (0.5 - theta * theta / 48.0) * nu;
  } else {
    c[0] = std::cos(0.5 * theta);
    c.tail<3>() = std::sin(0.5 * theta) / theta * nu;
  }
  return UnitQuat(c);
}

Vec3 log_at_identity(const UnitQuat& q) {
  double w = q.w();
  Vec3 v = q.vec();
  if (w < 0.0) {  // q and -q are the same rotation
    w = -w;
    v = -v;
  }
  const double nv = v.norm();
  if (nv < 1e-9) {
    return 2.0 / w * v;
  }
  const double angle = 2.0 * std::atan2(nv, w);
  return angle / nv * v;
}

Mat3 to_rotmat(const UnitQuat& q) {
  const double w = q.w();
  const Vec3 v = q.vec();
  return (w * w - v.squaredNorm()) * Mat3::Identity() + 2.0 * v * v.transpose() +
         2.0 * w * skew(v);
}

Mat4 left_matrix(const UnitQuat& q) {
  const double w = q.w();
  const Vec3 v = q.vec();
  Mat4 m;
  m(0, 0) = w;
  m.block<1, 3>(0, 1) = -v.transpose();
  m.block<3, 1>(1, 0) = v;
  m.block<3, 3>(1, 1) = w * Mat3::Identity() + skew(v);
  return m;
}

Mat4 right_matrix(const UnitQuat& q) {
  const double w = q.w();
  const Vec3 v = q.vec();
  Mat4 m;
  m(0, 0) = w;
  m.block<1, 3>(0, 1) = -v.transpose();
  m.block<3, 1>(1, 0) = v;
  m.block<3, 3>(1, 1) = w * Mat3::Identity() - skew(v);
  return m;
}

Mat43 d_exp_d_nu(const Vec3& nu) {
  const double theta = nu.norm();
  Mat43 j;
  if (theta < 1e-6) {
    j.row(0) = -0.25 * nu.transpose();
    j.block<3, 3>(1, 0) =
        (0.5 - theta * theta / 48.0) * Mat3::Identity() - nu * nu.transpose() / 24.0;
  } else {
    const double half = 0.5 * theta;
    const double s = std::sin(half), c = std::cos(half);
    j.row(0) = -0.5 * s / theta * nu.transpose();
    j.block<3, 3>(1, 0) = s / theta * Mat3::Identity() +
                          (0.5 * c / (theta * theta) - s / (theta * theta * theta)) *
                              nu * nu.transpose();
  }
  return j;
}

Mat34 d_rotation_d_q(const UnitQuat& q, const Vec3& a) {
  const double w = q.w();
  const Vec3 v = q.vec();
  Mat34 j;
  j.col(0) = 2.0 * (w * a + v.cross(a));
  j.block<3, 3>(0, 1) =
      2.0 * (v * a.transpose() + v.dot(a) * Mat3::Identity() - a * v.transpose() -
             w * skew(a));
  return j;
}

Mat34 d_conjugation_d_q(const UnitQuat& q, const Vec3& v) {
  // R(q)^T v = R(q*) v; chain through the conjugate's sign pattern.
  Mat34 j = d_rotation_d_q(q.conjugate(), v);
  j.rightCols<3>() *= -1.0;
  return j;
}

}  // namespace splio
