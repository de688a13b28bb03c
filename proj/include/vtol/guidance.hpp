#pragma once

#include <optional>

#include "vtol/geom3.hpp"

namespace vtol {

/// Circle in an arbitrary plane. Travel is counter-clockwise about `normal`.
struct CirclePath {
  Vec3 center = Vec3::Zero();
  Vec3 normal = -Vec3::UnitZ();
  double radius = 40.0;

  void validate() const;
};

/// Speed reference ramping linearly from v_start to v_end.
struct SpeedRamp {
  double v_start = 3.0;
  double v_end = 9.0;
  double ramp_rate = 0.1;  // m/s^2

  void validate() const;
};

struct GuidanceGains {
  double k_p = 1.0;   // trajectory position gain, 1/s^2
  double k_v = 1.8;   // trajectory velocity gain, 1/s
  double k_s = 0.8;   // path speed gain, 1/s
  double k_h = 1.0;   // heading alignment gain, 1/s
  double k_c = 0.6;   // cross-track steering weight
  double d_sat = 5.0;       // cross-track saturation distance, m
  double xi_max = 0.7 * 9.81;  // acceleration demand bound, m/s^2
  double heading_floor = 0.1;  // |v| below which the heading is held, m/s
  /// Below this inertial speed the speed law pushes along the desired heading
  /// rather than along the (ill-conditioned) velocity direction.
  double low_speed_heading = 1.0;  // m/s

  void validate() const;
};

/// Scales x down to norm `limit` when it is longer.
Vec3 saturate_norm(const Vec3& x, double limit);

/// xi = a_ref - k_p (p - p_ref) - k_v (v - v_ref), norm-saturated at xi_max.
Vec3 xi_trajectory(const Vec3& p, const Vec3& v, const Vec3& p_ref, const Vec3& v_ref,
                   const Vec3& a_ref, const GuidanceGains& gains);

/// clamp(v_start + rate t, v_start, v_end).
double speed_ref(double t, const SpeedRamp& ramp);

/// Closest point of a circle and the local unit tangent (travel direction).
struct CircleProjection {
  Vec3 closest = Vec3::Zero();
  Vec3 tangent = Vec3::UnitX();
  Vec3 error = Vec3::Zero();  // closest - p
  bool defined = false;       // false on the circle axis
};

CircleProjection project_on_circle(const Vec3& p, const CirclePath& path);

/// Path-following auxiliary input on an inclined circle,
///   xi = xi_v h + |v| (w_h x h),
/// with xi_v = -k_s (|v| - v*), w_h = (|v|/r) n + k_h (h x h*) and
/// h* = normalize(tangent + k_c sat(error / d_sat)).
/// Holds the last heading and tangent across degenerate samples.
class PathFollower {
 public:
  explicit PathFollower(GuidanceGains gains = {}) : gains_(gains) {}

  struct Output {
    Vec3 xi = Vec3::Zero();
    Vec3 heading = Vec3::UnitX();
    Vec3 desired_heading = Vec3::UnitX();
    double cross_track = 0.0;
  };

  Output update(const Vec3& p, const Vec3& v, const CirclePath& path, double v_star);

  /// h = v / |v|, or the previously returned heading when |v| <= floor.
  Vec3 heading_direction(const Vec3& v);

  const GuidanceGains& gains() const { return gains_; }

 private:
  GuidanceGains gains_;
  Vec3 heading_ = Vec3::UnitX();
  std::optional<Vec3> tangent_;
};

}  // namespace vtol
