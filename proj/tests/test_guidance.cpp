#include "vtol/guidance.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vtol/errors.hpp"

namespace vtol {
namespace {

using testing::Gen;

const GuidanceGains kGains;

CirclePath level_circle() {
  CirclePath c;
  c.center = Vec3(0, 0, -20);
  c.normal = -Vec3::UnitZ();
  c.radius = 40;
  return c;
}

TEST(XiTrajectory, Examples) {
  EXPECT_TRUE(xi_trajectory(Vec3(1, 2, 3), Vec3(4, 5, 6), Vec3(1, 2, 3), Vec3(4, 5, 6),
                            Vec3::Zero(), kGains)
                  .isZero(0.0));
  GuidanceGains g;
  g.k_p = 1.0;
  g.k_v = 0.0;
  EXPECT_TRUE(xi_trajectory(Vec3(1, 0, 0), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                            Vec3::Zero(), g)
                  .isApprox(Vec3(-1, 0, 0)));
}

TEST(XiTrajectory, SaturationPreservesDirection) {
  const Vec3 xi = xi_trajectory(Vec3(100, -50, 20), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                Vec3::Zero(), kGains);
  EXPECT_NEAR(xi.norm(), kGains.xi_max, 1e-12);
  EXPECT_LT((xi.normalized() - Vec3(-100, 50, -20).normalized()).norm(), 1e-12);
}

TEST(HeadingDirection, NormalizesAndHolds) {
  PathFollower f;
  EXPECT_TRUE(f.heading_direction(Vec3(5, 0, 0)).isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(f.heading_direction(Vec3(3, 4, 0)).isApprox(Vec3(0.6, 0.8, 0)));
  EXPECT_TRUE(f.heading_direction(Vec3(0.05, -0.05, 0)).isApprox(Vec3(0.6, 0.8, 0)));
  EXPECT_TRUE(f.heading_direction(Vec3(0, 0, 0.1)).isApprox(Vec3(0.6, 0.8, 0)));
}

TEST(SpeedRef, Examples) {
  const SpeedRamp r;
  EXPECT_EQ(speed_ref(0, r), 3.0);
  EXPECT_EQ(speed_ref(1e4, r), 9.0);
  EXPECT_DOUBLE_EQ(speed_ref((r.v_end - r.v_start) / (2 * r.ramp_rate), r), 6.0);
}

TEST(ProjectOnCircle, ClosestPointAndTangent) {
  const CirclePath c = level_circle();
  const CircleProjection pr = project_on_circle(Vec3(50, 0, -25), c);
  ASSERT_TRUE(pr.defined);
  EXPECT_TRUE(pr.closest.isApprox(Vec3(40, 0, -20)));
  // Counter-clockwise about "up": at +x the travel direction is -y... in NED
  // with normal up, n x radial = (-z) x x = -y.
  EXPECT_TRUE(pr.tangent.isApprox(Vec3(0, -1, 0)));
  EXPECT_FALSE(project_on_circle(Vec3(0, 0, 5), c).defined);
}

TEST(PathFollow, OnPathEquilibriumIsCentripetal) {
  Gen g(61);
  for (int n = 0; n < 200; ++n) {
    const CirclePath c = level_circle();
    const double phi = g.uniform(-M_PI, M_PI);
    const Vec3 radial(std::cos(phi), std::sin(phi), 0);
    const Vec3 p = c.center + c.radius * radial;
    const Vec3 tangent = c.normal.cross(radial);
    const double vs = g.uniform(3, 12);
    PathFollower f;
    const Vec3 xi = f.update(p, vs * tangent, c, vs).xi;
    EXPECT_LT(std::abs(xi.dot(tangent)), 1e-9);
    EXPECT_NEAR(xi.norm(), vs * vs / c.radius, 0.05 * vs * vs / c.radius);
    // Points toward the center.
    EXPECT_GT(xi.dot(-radial), 0.0);
  }
}

TEST(PathFollow, SpeedTermIsolation) {
  GuidanceGains g;
  g.k_s = 1.0;
  PathFollower f(g);
  const CirclePath c = level_circle();
  const Vec3 p = c.center + c.radius * Vec3::UnitX();
  const Vec3 tangent(0, -1, 0);
  const Vec3 xi = f.update(p, 5.0 * tangent, c, 6.0).xi;
  EXPECT_NEAR(xi.dot(tangent), 1.0, 1e-12);
}

TEST(PathFollow, CrossTrackSteersInward) {
  PathFollower f;
  const CirclePath c = level_circle();
  const Vec3 p = c.center + 50.0 * Vec3::UnitX();
  const auto out = f.update(p, 8.0 * Vec3(0, -1, 0), c, 8.0);
  EXPECT_NEAR(out.cross_track, 10.0, 1e-12);
  const Vec3 tilt = out.desired_heading - Vec3(0, -1, 0);
  EXPECT_LT(tilt.dot(Vec3::UnitX()), 0.0);  // toward the circle, i.e. -x
}

TEST(PathFollow, BoundedAndRotationInvariant) {
  Gen g(62);
  for (int n = 0; n < 1000; ++n) {
    CirclePath c;
    c.center = g.vec(50);
    c.normal = g.unit();
    c.radius = g.uniform(10, 80);
    const Vec3 p = g.vec(100), v = g.vec(15);
    const double vs = g.uniform(1, 12);
    PathFollower a, b;
    const Vec3 xi = a.update(p, v, c, vs).xi;
    EXPECT_LE(xi.norm(), kGains.xi_max + 1e-12);

    const Mat3 Q = g.rotation();
    CirclePath rc = c;
    rc.center = Q * c.center;
    rc.normal = Q * c.normal;
    // The heading memory starts at +x; keep |v| above the floor so it is unused.
    if (v.norm() < kGains.low_speed_heading) continue;
    const Vec3 xr = b.update(Q * p, Q * v, rc, vs).xi;
    EXPECT_LT((xr - Q * xi).norm(), 1e-9);
  }
}

TEST(PathFollow, CircleAxisHoldsPreviousTangent) {
  PathFollower f;
  const CirclePath c = level_circle();
  f.update(c.center + 40.0 * Vec3::UnitX(), Vec3(0, -5, 0), c, 5);
  const auto out = f.update(c.center, Vec3(0, -5, 0), c, 5);
  EXPECT_TRUE(out.desired_heading.isApprox(Vec3(0, -1, 0)));
  EXPECT_EQ(out.cross_track, c.radius);
}

TEST(GuidanceConfig, Validation) {
  CirclePath c;
  c.radius = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.normal = Vec3(0, 0, 2);
  EXPECT_THROW(c.validate(), ConfigError);
  SpeedRamp r;
  r.v_start = 0;
  EXPECT_THROW(r.validate(), ConfigError);
  GuidanceGains g;
  g.k_s = -1;
  EXPECT_THROW(g.validate(), ConfigError);
}

}  // namespace
}  // namespace vtol
