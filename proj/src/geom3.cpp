#include "vtol/geom3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vtol/errors.hpp"

namespace vtol {

Rotation Rotation::from_matrix(const Mat3& m) {
  if (!m.allFinite()) {
    throw ContractViolation("rotation has non-finite entries");
  }
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = m.determinant();
  if (ortho > kRotationTolerance || std::abs(det - 1.0) > kRotationTolerance) {
    throw ContractViolation("matrix is not in SO(3): orthonormality residual " +
                            std::to_string(ortho) + ", det " + std::to_string(det));
  }
  return Rotation(m);
}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n <= 1e-12) {
    throw DegenerateAxis("rotation axis has zero length");
  }
  return Rotation(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix());
}

Rotation Rotation::from_axes(const Vec3& i, const Vec3& j, const Vec3& k) {
  Mat3 m;
  m.col(0) = i;
  m.col(1) = j;
  m.col(2) = k;
  return from_matrix(m);
}

Eigen::Vector4d Rotation::quaternion() const {
  Eigen::Quaterniond q(m_);
  q.normalize();
  if (q.w() < 0.0) {
    q.coeffs() *= -1.0;
  }
  return {q.w(), q.x(), q.y(), q.z()};
}

Rotation Rotation::from_quaternion(const Eigen::Vector4d& wxyz) {
  const double n = wxyz.norm();
  if (n <= 1e-12) {
    throw DegenerateAxis("zero quaternion");
  }
  Eigen::Quaterniond q(wxyz(0) / n, wxyz(1) / n, wxyz(2) / n, wxyz(3) / n);
  return Rotation(q.toRotationMatrix());
}

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Vec3 vex(const Mat3& m) {
  const double asym = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kRotationTolerance)) {
    throw ContractViolation("vex: matrix is not skew-symmetric (residual " +
                            std::to_string(asym) + ")");
  }
  return {m(2, 1), m(0, 2), m(1, 0)};
}

Mat3 antisym(const Mat3& m) { return 0.5 * (m - m.transpose()); }

Vec3 project_perp(const Vec3& u, const Vec3& x) {
  const double n = u.norm();
  if (!(n > 1e-9)) {
    throw DegenerateAxis("project_perp: axis norm " + std::to_string(n) + " <= 1e-9");
  }
  const Vec3 uh = u / n;
  return x - x.dot(uh) * uh;
}

double distance_from_so3(const Mat3& r) {
  if (!r.allFinite() || r.determinant() <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  Eigen::JacobiSVD<Mat3> svd(r);
  return (svd.singularValues().array() - 1.0).abs().maxCoeff();
}

Rotation reorthonormalize(const Mat3& r) {
  if (!r.allFinite()) {
    throw NumericalDivergence("reorthonormalize: non-finite attitude matrix");
  }
  if (r.determinant() <= 0.0) {
    throw NumericalDivergence("reorthonormalize: attitude matrix lost orientation");
  }
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double dev = (svd.singularValues().array() - 1.0).abs().maxCoeff();
  if (dev > kRepairGate) {
    throw NumericalDivergence("reorthonormalize: attitude drifted " + std::to_string(dev) +
                              " from SO(3)");
  }
  return Rotation::unchecked(svd.matrixU() * svd.matrixV().transpose());
}

double rotation_angle(const Mat3& r) {
  // atan2 form stays accurate near 0 and pi, unlike acos of the trace.
  const Vec3 axis_sin{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
  return std::atan2(0.5 * axis_sin.norm(), 0.5 * (r.trace() - 1.0));
}

}  // namespace vtol
