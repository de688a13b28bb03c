#include "vtol/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "vtol/errors.hpp"

namespace vtol {

void CirclePath::validate() const {
  if (!(radius > 0.0)) {
    throw ConfigError("path: radius must be > 0");
  }
  if (std::abs(normal.norm() - 1.0) > 1e-9) {
    throw ConfigError("path: normal must be a unit vector");
  }
  if (!center.allFinite()) {
    throw ConfigError("path: center must be finite");
  }
}

void SpeedRamp::validate() const {
  if (!(v_start > 0.0 && v_end > 0.0)) {
    throw ConfigError("speed ramp: speeds must be > 0");
  }
  if (!(ramp_rate > 0.0)) {
    throw ConfigError("speed ramp: ramp_rate must be > 0");
  }
}

void GuidanceGains::validate() const {
  for (double g : {k_p, k_v, k_s, k_h, k_c, d_sat, xi_max, heading_floor}) {
    if (!(g > 0.0)) {
      throw ConfigError("guidance gains must be positive");
    }
  }
  if (low_speed_heading < heading_floor) {
    throw ConfigError("guidance: low_speed_heading must be >= heading_floor");
  }
}

Vec3 saturate_norm(const Vec3& x, double limit) {
  const double n = x.norm();
  return n > limit ? Vec3(x * (limit / n)) : x;
}

Vec3 xi_trajectory(const Vec3& p, const Vec3& v, const Vec3& p_ref, const Vec3& v_ref,
                   const Vec3& a_ref, const GuidanceGains& gains) {
  const Vec3 raw = a_ref - gains.k_p * (p - p_ref) - gains.k_v * (v - v_ref);
  return saturate_norm(raw, gains.xi_max);
}

double speed_ref(double t, const SpeedRamp& ramp) {
  const double lo = std::min(ramp.v_start, ramp.v_end);
  const double hi = std::max(ramp.v_start, ramp.v_end);
  const double dir = ramp.v_end >= ramp.v_start ? 1.0 : -1.0;
  return std::clamp(ramp.v_start + dir * ramp.ramp_rate * std::max(t, 0.0), lo, hi);
}

CircleProjection project_on_circle(const Vec3& p, const CirclePath& path) {
  CircleProjection out;
  const Vec3 in_plane = project_perp(path.normal, p - path.center);
  const double rho = in_plane.norm();
  if (rho < 1e-6) {
    return out;
  }
  const Vec3 radial = in_plane / rho;
  out.closest = path.center + path.radius * radial;
  out.tangent = path.normal.cross(radial);
  out.error = out.closest - p;
  out.defined = true;
  return out;
}

Vec3 PathFollower::heading_direction(const Vec3& v) {
  const double speed = v.norm();
  if (speed > gains_.heading_floor) {
    heading_ = v / speed;
  }
  return heading_;
}

PathFollower::Output PathFollower::update(const Vec3& p, const Vec3& v, const CirclePath& path,
                                          double v_star) {
  Output out;
  const CircleProjection proj = project_on_circle(p, path);
  Vec3 error = proj.error;
  if (proj.defined) {
    tangent_ = proj.tangent;
  } else {
    error = Vec3::Zero();
  }
  const Vec3 tangent = tangent_.value_or(heading_);
  out.cross_track = proj.defined ? proj.error.norm() : path.radius;

  Vec3 desired = tangent + gains_.k_c * saturate_norm(error / gains_.d_sat, 1.0);
  desired.normalize();
  out.desired_heading = desired;

  const double speed = v.norm();
  const double xi_v = -gains_.k_s * (speed - v_star);
  if (speed < gains_.low_speed_heading) {
    heading_direction(v);
    out.heading = desired;
    out.xi = saturate_norm(xi_v * desired, gains_.xi_max);
    return out;
  }
  const Vec3 h = heading_direction(v);
  out.heading = h;
  const Vec3 turn_rate = (speed / path.radius) * path.normal + gains_.k_h * h.cross(desired);
  out.xi = saturate_norm(xi_v * h + speed * turn_rate.cross(h), gains_.xi_max);
  return out;
}

}  // namespace vtol
