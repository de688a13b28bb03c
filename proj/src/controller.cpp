#include "vtol/controller.hpp"

#include <algorithm>
#include <cmath>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

AirVelEstimatorConfig estimator_config(const Scenario& s) {
  AirVelEstimatorConfig c = s.controller.estimator;
  c.g0 = s.aircraft.g0;
  return c;
}

}  // namespace

std::string to_string(MissionPhase p) {
  switch (p) {
    case MissionPhase::Hold: return "hold";
    case MissionPhase::Takeoff: return "takeoff";
    case MissionPhase::Path: return "path";
    case MissionPhase::Track: return "track";
  }
  return "unknown";
}

TrajectoryPoint climb_reference(double t, const Vec3& from, const Vec3& to, double duration) {
  TrajectoryPoint r;
  const double s = std::clamp(t / duration, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s;
  const double pos = s3 * (10.0 - 15.0 * s + 6.0 * s2);
  const double vel = 30.0 * s2 * (1.0 - s) * (1.0 - s) / duration;
  const double acc = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (duration * duration);
  const Vec3 d = to - from;
  r.p = from + pos * d;
  if (t > 0.0 && t < duration) {
    r.v = vel * d;
    r.a = acc * d;
  }
  return r;
}

Controller::Controller(const Scenario& scenario)
    : scenario_(scenario),
      path_(scenario.mission.circle()),
      follower_(scenario.controller.guidance),
      estimator_(estimator_config(scenario)),
      selector_(scenario.controller.frame, scenario.aircraft),
      frame_rate_(scenario.controller.frame_rate_time_constant),
      torque_(scenario.controller.rate, scenario.controller.torque_mode,
              scenario.controller.torque_derivative_time_constant) {
  scenario_.validate();
}

MissionPhase Controller::phase_at(double t) const {
  switch (scenario_.mission.kind) {
    case MissionKind::Hover: return MissionPhase::Hold;
    case MissionKind::Line: return MissionPhase::Track;
    case MissionKind::Circle:
      return t < scenario_.mission.takeoff_duration ? MissionPhase::Takeoff : MissionPhase::Path;
  }
  return MissionPhase::Hold;
}

Vec3 Controller::guidance(double t, const RigidState& s, ControlOutput& out) {
  const MissionConfig& m = scenario_.mission;
  const GuidanceGains& g = scenario_.controller.guidance;
  out.phase = phase_at(t);
  switch (out.phase) {
    case MissionPhase::Hold: {
      out.cross_track = (s.p - m.hover_point).norm();
      out.speed_error = s.v.norm();
      return xi_trajectory(s.p, s.v, m.hover_point, Vec3::Zero(), Vec3::Zero(), g);
    }
    case MissionPhase::Takeoff: {
      const TrajectoryPoint ref =
          climb_reference(t, m.initial.position, m.takeoff_top(), m.takeoff_duration);
      out.cross_track = (s.p - ref.p).norm();
      out.v_ref = ref.v.norm();
      out.speed_error = (s.v - ref.v).norm();
      // Keep the heading memory pointed along the first path tangent.
      follower_.heading_direction(s.v);
      return xi_trajectory(s.p, s.v, ref.p, ref.v, ref.a, g);
    }
    case MissionPhase::Track: {
      const Vec3 dir = m.line_direction.normalized();
      const Vec3 p_ref = m.initial.position + dir * (m.line_speed * t);
      const Vec3 v_ref = dir * m.line_speed;
      out.v_ref = m.line_speed;
      out.cross_track = project_perp(dir, s.p - m.initial.position).norm();
      out.speed_error = s.v.norm() - m.line_speed;
      return xi_trajectory(s.p, s.v, p_ref, v_ref, Vec3::Zero(), g);
    }
    case MissionPhase::Path: {
      out.v_ref = speed_ref(t - m.takeoff_duration, m.ramp);
      const PathFollower::Output pf = follower_.update(s.p, s.v, path_, out.v_ref);
      out.cross_track = pf.cross_track;
      out.speed_error = s.v.norm() - out.v_ref;
      return pf.xi;
    }
  }
  return Vec3::Zero();
}

ControlOutput Controller::update(double t, const RigidState& s, double pitot_reading,
                                 const Vec3& v_a_true, double dt) {
  ControlOutput out;
  out.xi = guidance(t, s, out);

  out.estimate = estimator_.update(s.v, s.R, s.omega, pitot_reading, dt);
  out.v_a_inertial =
      scenario_.controller.use_true_airspeed ? v_a_true : Vec3(s.R * out.estimate.v_a_hat);

  out.selection = selector_.select(out.xi, out.v_a_inertial, s.R, dt);
  const DesiredFrame& frame = out.selection.frame;
  out.frame_rate = frame_rate_.update(frame, dt);

  const RateGains& gains = scenario_.controller.rate;
  out.omega_star = frame.regime == FlightRegime::LowSpeed
                       ? omega_star_low(frame.j_d, frame.k_bar, s.R, out.frame_rate, gains)
                       : omega_star_high(frame, s.R, out.frame_rate, gains);

  out.command.thrust = out.selection.command.thrust;
  out.command.tilt = out.selection.command.tilt;
  out.command.torque = torque_.update(s.omega, out.omega_star, dt, scenario_.aircraft);

  try {
    out.allocation = allocate(out.command.thrust, out.command.tilt, out.command.torque,
                              out.v_a_inertial.norm(), scenario_.aircraft,
                              scenario_.controller.split);
  } catch (const AllocationInfeasible& e) {
    out.allocation_error = e.what();
  }
  return out;
}

}  // namespace vtol
