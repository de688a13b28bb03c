#include "vtol/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vtol/errors.hpp"

namespace vtol {

WindProfile WindProfile::circle_mission() {
  WindProfile w;
  w.steady = Vec3(3.0, 0.0, 0.0);
  w.gust_magnitude = 2.0;
  w.gust_duration = 2.0;
  w.gust_period = 10.0;
  w.gust_direction = Vec3::UnitX();
  return w;
}

void WindProfile::validate() const {
  if (!steady.allFinite()) {
    throw ConfigError("wind: steady component must be finite");
  }
  if (gust_magnitude < 0.0 || gust_duration < 0.0 || gust_period < 0.0 || ramp_time < 0.0) {
    throw ConfigError("wind: gust magnitude, duration, period and ramp must be >= 0");
  }
  if (gust_magnitude > 0.0) {
    if (!(gust_period > 0.0) || gust_duration > gust_period) {
      throw ConfigError("wind: gust_duration must not exceed gust_period");
    }
    if (std::abs(gust_direction.norm() - 1.0) > 1e-9) {
      throw ConfigError("wind: gust_direction must be a unit vector");
    }
    if (2.0 * ramp_time > gust_duration) {
      throw ConfigError("wind: gust ramps longer than the gust itself");
    }
  }
}

double WindProfile::gust_envelope(double t) const {
  if (gust_magnitude <= 0.0 || gust_duration <= 0.0 || gust_period <= 0.0 || t < 0.0) {
    return 0.0;
  }
  const double phase = std::fmod(t, gust_period);
  if (phase >= gust_duration) {
    return 0.0;
  }
  auto ramp = [this](double x) {
    return 0.5 * (1.0 - std::cos(std::numbers::pi * x / ramp_time));
  };
  if (ramp_time > 0.0 && phase < ramp_time) {
    return ramp(phase);
  }
  if (ramp_time > 0.0 && phase > gust_duration - ramp_time) {
    return ramp(gust_duration - phase);
  }
  return 1.0;
}

Vec3 wind_at(double t, const WindProfile& profile) {
  return profile.steady + profile.gust_magnitude * profile.gust_envelope(t) * profile.gust_direction;
}

StateDerivative derivatives(const RigidState& s, const PlantInput& u, const Vec3& v_wind,
                            const AircraftParams& params) {
  const Mat3& R = s.R.matrix();
  const Vec3 v_a_body = R.transpose() * (s.v - v_wind);
  const Vec3 f_body = aero_force_body(v_a_body, params) + u.thrust * thrust_direction(u.tilt);
  const Vec3 gravity(0.0, 0.0, params.g0);

  StateDerivative d;
  d.p_dot = s.v;
  d.v_dot = gravity + R * f_body / params.mass;
  d.R_dot = R * skew(s.omega);
  const Vec3 h = params.inertia * s.omega;
  d.omega_dot = params.inertia.ldlt().solve(u.torque - s.omega.cross(h));
  return d;
}

void check_finite(const RigidState& s) {
  if (!s.p.allFinite()) throw NumericalDivergence("plant state diverged: position");
  if (!s.v.allFinite()) throw NumericalDivergence("plant state diverged: velocity");
  if (!s.R.matrix().allFinite()) throw NumericalDivergence("plant state diverged: attitude");
  if (!s.omega.allFinite()) throw NumericalDivergence("plant state diverged: angular rate");
}

namespace {

// Intermediate RK stages carry an unconstrained attitude matrix.
struct RawState {
  Vec3 p, v;
  Mat3 R;
  Vec3 omega;
};

StateDerivative eval(const RawState& x, const PlantInput& u, const Vec3& wind,
                     const AircraftParams& params) {
  RigidState s;
  s.p = x.p;
  s.v = x.v;
  s.R = Rotation::unchecked(x.R);
  s.omega = x.omega;
  return derivatives(s, u, wind, params);
}

RawState advance(const RawState& x, const StateDerivative& d, double h) {
  return {x.p + h * d.p_dot, x.v + h * d.v_dot, x.R + h * d.R_dot, x.omega + h * d.omega_dot};
}

}  // namespace

RigidState step(const RigidState& s, const PlantInput& u, double t, double dt,
                const WindProfile& profile, const AircraftParams& params) {
  if (!(dt > 0.0 && dt <= kMaxPlantStep)) {
    throw ContractViolation("plant step dt must lie in (0, 0.02], got " + std::to_string(dt));
  }
  if (!(u.thrust >= 0.0)) {
    throw ContractViolation("plant thrust must be >= 0");
  }
  if (!u.torque.allFinite() || !std::isfinite(u.tilt)) {
    throw NumericalDivergence("plant input is not finite");
  }
  check_finite(s);
  const RawState x0{s.p, s.v, s.R.matrix(), s.omega};
  const Vec3 w0 = wind_at(t, profile);
  const Vec3 wm = wind_at(t + 0.5 * dt, profile);
  const Vec3 w1 = wind_at(t + dt, profile);

  const StateDerivative k1 = eval(x0, u, w0, params);
  const StateDerivative k2 = eval(advance(x0, k1, 0.5 * dt), u, wm, params);
  const StateDerivative k3 = eval(advance(x0, k2, 0.5 * dt), u, wm, params);
  const StateDerivative k4 = eval(advance(x0, k3, dt), u, w1, params);

  const double w = dt / 6.0;
  RawState x1;
  x1.p = x0.p + w * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  x1.v = x0.v + w * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  x1.R = x0.R + w * (k1.R_dot + 2.0 * k2.R_dot + 2.0 * k3.R_dot + k4.R_dot);
  x1.omega = x0.omega + w * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);

  RigidState out;
  out.p = x1.p;
  out.v = x1.v;
  out.omega = x1.omega;
  if (!x1.R.allFinite()) {
    check_finite(out);
    throw NumericalDivergence("plant state diverged: attitude");
  }
  out.R = reorthonormalize(x1.R);
  check_finite(out);
  return out;
}

}  // namespace vtol
