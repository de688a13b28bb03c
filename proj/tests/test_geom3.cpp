#include "vtol/geom3.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vtol/errors.hpp"

namespace vtol {
namespace {

using testing::Gen;

constexpr int kSamples = 2000;

TEST(Skew, ZeroVectorGivesZeroMatrix) { EXPECT_TRUE(skew(Vec3::Zero()).isZero(0.0)); }

TEST(Skew, BasisCrossProduct) {
  EXPECT_TRUE((skew(Vec3::UnitX()) * Vec3::UnitY()).isApprox(Vec3::UnitZ()));
}

TEST(Skew, MatchesComponentwiseCross) {
  Gen g(11);
  for (int n = 0; n < kSamples; ++n) {
    const Vec3 a = g.vec(10), b = g.vec(10);
    EXPECT_LT((skew(a) * b - testing::cross_components(a, b)).norm(), 1e-12);
    EXPECT_TRUE((skew(a).transpose() + skew(a)).isZero(0.0));
  }
}

TEST(Skew, AnticommutesAndCrossOfCross) {
  Gen g(12);
  for (int n = 0; n < kSamples; ++n) {
    const Vec3 a = g.vec(3), b = g.vec(3);
    EXPECT_LT((skew(a) * b + skew(b) * a).norm(), 1e-12);
    const Mat3 lhs = skew(a.cross(b));
    const Mat3 rhs = b * a.transpose() - a * b.transpose();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Vex, InvertsSkew) {
  EXPECT_TRUE(vex(skew(Vec3(1, 2, 3))).isApprox(Vec3(1, 2, 3)));
  EXPECT_TRUE(vex(Mat3::Zero()).isZero(0.0));
  Gen g(13);
  for (int n = 0; n < kSamples; ++n) {
    const Vec3 a = g.vec(100);
    EXPECT_LT((vex(skew(a)) - a).norm(), 1e-12);
  }
}

TEST(Vex, RejectsNonSkewInput) {
  Mat3 m = skew(Vec3(1, 2, 3));
  m(0, 0) = 1e-6;
  EXPECT_THROW(vex(m), ContractViolation);
  EXPECT_THROW(vex(Mat3::Identity()), ContractViolation);
  m(0, 0) = 1e-11;
  EXPECT_NO_THROW(vex(m));
}

TEST(Antisym, SymmetricAndSkewInputs) {
  Gen g(14);
  const Mat3 m = g.mat();
  EXPECT_TRUE(antisym(m + m.transpose()).isZero(1e-15));
  const Mat3 s = skew(g.vec());
  EXPECT_TRUE(antisym(s).isApprox(s));
  for (int n = 0; n < kSamples; ++n) {
    const Mat3 x = g.mat(5);
    const Mat3 a = antisym(x);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(a(r, c), 0.5 * (x(r, c) - x(c, r)));
    EXPECT_TRUE(antisym(a).isApprox(a));
  }
}

TEST(ProjectPerp, Examples) {
  EXPECT_TRUE(project_perp(Vec3::UnitZ(), Vec3(1, 2, 3)).isApprox(Vec3(1, 2, 0)));
  EXPECT_LT(project_perp(Vec3(1, 2, 3), Vec3(2, 4, 6)).norm(), 1e-14);
}

TEST(ProjectPerp, OrthogonalIdempotentLinear) {
  Gen g(15);
  for (int n = 0; n < kSamples; ++n) {
    const Vec3 u = g.vec(5), x = g.vec(5), y = g.vec(5);
    const double s = g.uniform(-3, 3);
    const Vec3 p = project_perp(u, x);
    EXPECT_LT(std::abs(p.dot(u.normalized())), 1e-12);
    EXPECT_LT((p + x.dot(u.normalized()) * u.normalized() - x).norm(), 1e-12);
    EXPECT_LT((project_perp(u, p) - p).norm(), 1e-12);
    EXPECT_LT((project_perp(u, s * x + y) - (s * p + project_perp(u, y))).norm(), 1e-11);
  }
}

TEST(ProjectPerp, DegenerateAxis) {
  EXPECT_THROW(project_perp(Vec3(1e-10, 0, 0), Vec3::UnitX()), DegenerateAxis);
  EXPECT_THROW(project_perp(Vec3::Zero(), Vec3::UnitX()), DegenerateAxis);
}

TEST(Reorthonormalize, IdentityAndExactRotations) {
  EXPECT_TRUE(reorthonormalize(Mat3::Identity()).matrix().isApprox(Mat3::Identity()));
  Gen g(16);
  for (int n = 0; n < 200; ++n) {
    const Mat3 r = g.rotation();
    EXPECT_LT((reorthonormalize(r).matrix() - r).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Reorthonormalize, ScaledColumnsMatchPolarOracle) {
  Gen g(17);
  const Mat3 r = g.rotation();
  const Mat3 scaled = r * 1.0005;
  const Mat3 fixed = reorthonormalize(scaled).matrix();
  EXPECT_LT(testing::orthonormality_error(fixed), 1e-12);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(fixed.col(c).norm(), 1.0, 1e-12);
  EXPECT_LT((fixed - r).cwiseAbs().maxCoeff(), 1e-12);

  for (int n = 0; n < 500; ++n) {
    const Mat3 noisy = g.rotation() + g.mat(3e-4);
    const Mat3 ours = reorthonormalize(noisy).matrix();
    EXPECT_LT((ours - testing::polar_newton(noisy)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(ours.determinant(), 1.0, 1e-12);
  }
}

TEST(Reorthonormalize, RejectsFarFromRotationGroup) {
  EXPECT_THROW(reorthonormalize(1.01 * Mat3::Identity()), NumericalDivergence);
  EXPECT_THROW(reorthonormalize(Mat3(Eigen::Vector3d(1, 1, -1).asDiagonal())), NumericalDivergence);
  Mat3 nan = Mat3::Identity();
  nan(1, 2) = std::nan("");
  EXPECT_THROW(reorthonormalize(nan), NumericalDivergence);
}

TEST(Rotation, FromMatrixValidates) {
  EXPECT_NO_THROW(Rotation::from_matrix(Mat3::Identity()));
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 1 + 1e-6;
  EXPECT_THROW(Rotation::from_matrix(bad), ContractViolation);
  EXPECT_THROW(Rotation::from_matrix(-Mat3::Identity()), ContractViolation);
}

TEST(Rotation, AxesAreColumns) {
  Gen g(18);
  const Mat3 m = g.rotation();
  const Rotation r = Rotation::from_matrix(m);
  EXPECT_EQ(r.i(), Vec3(m.col(0)));
  EXPECT_EQ(r.j(), Vec3(m.col(1)));
  EXPECT_EQ(r.k(), Vec3(m.col(2)));
  EXPECT_TRUE(Rotation::from_axes(r.i(), r.j(), r.k()).matrix().isApprox(m));
}

TEST(Rotation, AboutAxisMatchesRodrigues) {
  Gen g(19);
  for (int n = 0; n < 200; ++n) {
    const Vec3 u = g.unit();
    const double a = g.uniform(-3, 3);
    EXPECT_LT((Rotation::about_axis(u, a).matrix() - Gen::rodrigues(u, a)).cwiseAbs().maxCoeff(),
              1e-14);
  }
}

TEST(Rotation, QuaternionRoundTrip) {
  Gen g(20);
  for (int n = 0; n < 500; ++n) {
    const Rotation r = Rotation::unchecked(g.rotation());
    const Eigen::Vector4d q = r.quaternion();
    EXPECT_GE(q(0), 0.0);
    EXPECT_NEAR(q.norm(), 1.0, 1e-14);
    EXPECT_LT((Rotation::from_quaternion(q).matrix() - r.matrix()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(RotationAngle, MatchesConstruction) {
  Gen g(21);
  for (int n = 0; n < 500; ++n) {
    const double a = g.uniform(0, M_PI);
    EXPECT_NEAR(rotation_angle(Gen::rodrigues(g.unit(), a)), a, 1e-9);
  }
  EXPECT_NEAR(rotation_angle(Gen::rodrigues(Vec3::UnitZ(), M_PI)), M_PI, 1e-15);
  EXPECT_EQ(rotation_angle(Mat3::Identity()), 0.0);
}

}  // namespace
}  // namespace vtol
