#pragma once

// Quaternion algebra for the 6-DoF spline trajectory representation.
// Hamilton convention, w-first storage: q = [w, x, y, z], identity = [1,0,0,0].

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace splio {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat43 = Eigen::Matrix<double, 4, 3>;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Unit quaternion, Hamilton convention, w-first. Every constructor
/// normalizes, so instances stay on the unit sphere to within 1e-12.
class UnitQuat {
 public:
  UnitQuat() : c_(1.0, 0.0, 0.0, 0.0) {}
  UnitQuat(double w, double x, double y, double z) : c_(w, x, y, z) { normalize(); }
  explicit UnitQuat(const Vec4& wxyz) : c_(wxyz) { normalize(); }

  static UnitQuat identity() { return UnitQuat(); }

  double w() const { return c_[0]; }
  double x() const { return c_[1]; }
  double y() const { return c_[2]; }
  double z() const { return c_[3]; }

  /// Coefficients as a 4-vector, w first.
  const Vec4& coeffs() const { return c_; }
  /// Imaginary (vector) part.
  Vec3 vec() const { return c_.tail<3>(); }

  UnitQuat conjugate() const {
    UnitQuat q;
    q.c_ << c_[0], -c_[1], -c_[2], -c_[3];
    return q;
  }
  UnitQuat inverse() const { return conjugate(); }

  UnitQuat& normalize() {
    c_ /= c_.norm();
    return *this;
  }

  /// Rotates v by this quaternion: q • v • q^-1.
  Vec3 rotate(const Vec3& v) const;

 private:
  Vec4 c_;
};

/// Hamilton product a • b.
UnitQuat hamilton_product(const UnitQuat& a, const UnitQuat& b);
inline UnitQuat operator*(const UnitQuat& a, const UnitQuat& b) { return hamilton_product(a, b); }

/// Exponential map at the identity quaternion:
/// nu -> [cos(|nu|/2), sin(|nu|/2) nu/|nu|]. Taylor branch below 1e-8.
UnitQuat exp_at_identity(const Vec3& nu);

/// Logarithm map at the identity quaternion, principal domain |nu| < pi.
/// Canonicalizes the antipodal ambiguity by flipping sign so that w >= 0.
Vec3 log_at_identity(const UnitQuat& q);

/// Rotation matrix of q, i.e. R such that R v = q • v • q^-1.
Mat3 to_rotmat(const UnitQuat& q);

/// 4x4 left product matrix: left_matrix(a) * b.coeffs() = (a • b).coeffs().
Mat4 left_matrix(const UnitQuat& q);

/// 4x4 right product matrix: right_matrix(b) * a.coeffs() = (a • b).coeffs().
Mat4 right_matrix(const UnitQuat& q);

/// Jacobian of exp_at_identity as a 4-vector w.r.t. the 3-vector argument.
/// Taylor branch below 1e-6.
Mat43 d_exp_d_nu(const Vec3& nu);

/// Jacobian of the vector part of q^-1 • v • q (= R(q)^T v) w.r.t. the four
/// quaternion components.
Mat34 d_conjugation_d_q(const UnitQuat& q, const Vec3& v);

/// Jacobian of R(q) v (= q • v • q^-1) w.r.t. the four quaternion components.
Mat34 d_rotation_d_q(const UnitQuat& q, const Vec3& v);

/// Skew-symmetric cross-product matrix.
Mat3 skew(const Vec3& v);

}  // namespace splio
