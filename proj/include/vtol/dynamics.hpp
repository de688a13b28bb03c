#pragma once

#include "vtol/airframe.hpp"
#include "vtol/geom3.hpp"

namespace vtol {

/// Vehicle pose and twist. Inertial frame is north-east-down (k0 points down).
struct RigidState {
  Vec3 p = Vec3::Zero();      // inertial position, m
  Vec3 v = Vec3::Zero();      // inertial velocity, m/s
  Rotation R;                 // body -> inertial
  Vec3 omega = Vec3::Zero();  // body angular rate, rad/s
};

struct StateDerivative {
  Vec3 p_dot = Vec3::Zero();
  Vec3 v_dot = Vec3::Zero();
  Mat3 R_dot = Mat3::Zero();
  Vec3 omega_dot = Vec3::Zero();
};

/// Steady wind plus periodic gusts. Each gust occupies the first
/// gust_duration seconds of every gust_period window, with cosine ramps of
/// ramp_time at both edges.
struct WindProfile {
  Vec3 steady = Vec3::Zero();
  double gust_magnitude = 0.0;
  double gust_duration = 0.0;
  double gust_period = 0.0;
  Vec3 gust_direction = Vec3::UnitX();
  double ramp_time = 0.2;

  /// 3 m/s along i0 with 2 m/s gusts lasting 2 s every 10 s.
  static WindProfile circle_mission();
  void validate() const;
  /// Gust envelope in [0, 1] at time t.
  double gust_envelope(double t) const;
};

struct PlantInput {
  double thrust = 0.0;         // N, >= 0
  double tilt = 0.0;           // rad
  Vec3 torque = Vec3::Zero();  // body, N m
};

inline constexpr double kMaxPlantStep = 0.02;

Vec3 wind_at(double t, const WindProfile& profile);

/// Newton-Euler right-hand side with the aerodynamic model of aero_force_body.
/// `v_wind` is the inertial wind velocity.
StateDerivative derivatives(const RigidState& s, const PlantInput& u, const Vec3& v_wind,
                            const AircraftParams& params);

/// One classical RK4 step with the input held, followed by attitude repair.
/// Throws NumericalDivergence naming the first non-finite field.
RigidState step(const RigidState& s, const PlantInput& u, double t, double dt,
                const WindProfile& profile, const AircraftParams& params);

/// Throws NumericalDivergence when any field is not finite.
void check_finite(const RigidState& s);

}  // namespace vtol
