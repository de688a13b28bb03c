#pragma once

#include <Eigen/Dense>

namespace vtol {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Orthonormality / determinant tolerance for members of SO(3).
inline constexpr double kRotationTolerance = 1e-9;
/// Largest singular-value deviation that reorthonormalize() agrees to repair.
inline constexpr double kRepairGate = 1e-3;

/// Rotation matrix from body to inertial coordinates. Columns are the body
/// axes (i, j, k) expressed in the inertial basis.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Validates the SO(3) invariants; throws ContractViolation otherwise.
  static Rotation from_matrix(const Mat3& m);
  /// No validation. Callers guarantee the matrix is orthonormal.
  static Rotation unchecked(const Mat3& m) { return Rotation(m); }
  static Rotation identity() { return Rotation(); }
  static Rotation about_axis(const Vec3& axis, double angle);
  /// Columns given as unit vectors; validated.
  static Rotation from_axes(const Vec3& i, const Vec3& j, const Vec3& k);

  const Mat3& matrix() const { return m_; }
  Vec3 i() const { return m_.col(0); }
  Vec3 j() const { return m_.col(1); }
  Vec3 k() const { return m_.col(2); }

  Rotation transpose() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// Unit quaternion (w, x, y, z) with w >= 0.
  Eigen::Vector4d quaternion() const;
  static Rotation from_quaternion(const Eigen::Vector4d& wxyz);

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

/// Inverse of skew(). Throws ContractViolation when M is not skew-symmetric
/// within kRotationTolerance.
Vec3 vex(const Mat3& m);

/// (M - M^T) / 2.
Mat3 antisym(const Mat3& m);

/// Projection of x on the plane orthogonal to u. Throws DegenerateAxis when
/// |u| <= 1e-9.
Vec3 project_perp(const Vec3& u, const Vec3& x);

/// Closest rotation in Frobenius norm (polar factor). Throws
/// NumericalDivergence when the input is not within kRepairGate of SO(3).
Rotation reorthonormalize(const Mat3& r);

/// Largest |sigma_i - 1| over the singular values, or +inf when det <= 0.
double distance_from_so3(const Mat3& r);

/// Rotation angle in [0, pi].
double rotation_angle(const Mat3& r);

}  // namespace vtol
