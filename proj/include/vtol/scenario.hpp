#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "vtol/airframe.hpp"
#include "vtol/airvel_estimator.hpp"
#include "vtol/allocation.hpp"
#include "vtol/attitude_rate.hpp"
#include "vtol/desired_frame.hpp"
#include "vtol/dynamics.hpp"
#include "vtol/guidance.hpp"

namespace vtol {

enum class MissionKind { Hover, Circle, Line };

std::string to_string(MissionKind k);

struct InitialCondition {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;  // rad, heading of the body i axis
  /// Start on the desired frame of the first control cycle (trimmed attitude).
  bool trim = false;
};

struct MissionConfig {
  MissionKind kind = MissionKind::Circle;
  InitialCondition initial;
  // Hover: hold this point.
  Vec3 hover_point = Vec3(0.0, 0.0, -10.0);
  // Circle: smooth climb from the initial position to takeoff_altitude, then
  // path following on an inclined circle whose lowest point is the top of the
  // climb and whose tangent there is -i0.
  double takeoff_duration = 10.0;  // s
  double takeoff_altitude = 10.0;  // m above the initial position
  double circle_radius = 40.0;     // m
  double circle_inclination = 10.0 * std::numbers::pi / 180.0;  // rad
  SpeedRamp ramp;
  // Line: constant-velocity straight reference through the initial position.
  Vec3 line_direction = -Vec3::UnitX();
  double line_speed = 9.0;  // m/s

  void validate() const;
  Vec3 takeoff_top() const { return initial.position - takeoff_altitude * Vec3::UnitZ(); }
  CirclePath circle() const;
};

struct ControllerConfig {
  GuidanceGains guidance;
  FrameConfig frame;
  RateGains rate;
  TorqueMode torque_mode = TorqueMode::Simple;
  TorqueSplitConfig split;
  AirVelEstimatorConfig estimator;
  double frame_rate_time_constant = 0.05;  // s
  double torque_derivative_time_constant = 0.02;  // s
  /// Feed the true air velocity to the frame construction (diagnostics).
  bool use_true_airspeed = false;

  void validate() const;
};

/// Plant parameters relative to the controller's model.
struct PlantMismatch {
  double mass = 1.0;
  double inertia = 1.0;
  double aero = 1.0;

  void validate() const;
  AircraftParams apply(const AircraftParams& model) const;
};

struct SimSettings {
  double duration = 110.0;   // s
  double plant_dt = 0.001;   // s
  double control_dt = 0.004; // s, integer multiple of plant_dt
  std::uint64_t seed = 1;
  double pitot_noise = 0.0;         // m/s, standard deviation
  double disturbance_torque = 0.0;  // N m, uniform bound per axis, per control cycle
  PlantMismatch mismatch;

  void validate() const;
  int plant_substeps() const;
};

struct Scenario {
  std::string name = "scenario";
  AircraftParams aircraft;
  WindProfile wind;
  MissionConfig mission;
  ControllerConfig controller;
  SimSettings sim;

  void validate() const;

  /// Hold position 0.5 m away from the start, no wind.
  static Scenario hover();
  /// Takeoff, inclined circle, 3 -> 9 m/s ramp, 3 m/s wind with gusts.
  static Scenario circle_mission();
  /// Trimmed straight cruise into a steady 3 m/s wind.
  static Scenario cruise();
};

/// Parses a scenario document. `aircraft` may be an object or a path to a
/// parameter file, resolved against base_dir. Unknown keys are rejected.
Scenario scenario_from_json(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace vtol
