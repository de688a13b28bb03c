#pragma once

#include <filesystem>
#include <numbers>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "vtol/geom3.hpp"

namespace vtol {

/// Vehicle parameters. Numeric defaults are a synthetic Eflite-like set; they
/// are not measured data of any real airframe.
struct AircraftParams {
  double mass = 1.0;  // kg
  Mat3 inertia = Eigen::Vector3d(0.02, 0.03, 0.04).asDiagonal();  // kg m^2
  double g0 = 9.81;  // m/s^2

  // Aerodynamic force coefficients, N s^2 / m^2.
  double c0 = 0.05;      // along i
  double c0_bar = 0.5;   // along k
  double c_lat = 0.2;    // lateral damping along j

  // Rotor thrust constants, N s^2.
  double mu12 = 1e-5;
  double mu3 = 1e-5;

  // Rotor geometry, m.
  double r1 = 0.2;
  double r2 = 0.2;
  double r3 = 0.4;
  double nu12 = 0.02;
  double nu3 = 0.02;

  /// Surface map: (delta1, delta2) = A * Gamma_a / |v_a|^2. Rows are the two
  /// surfaces (roll, pitch).
  Eigen::Matrix<double, 2, 3> surface_map =
      (Eigen::Matrix<double, 2, 3>() << 0.5, 0.0, 0.0, 0.0, 0.5, 0.0).finished();

  double rotor_speed_min = 50.0;    // rad/s
  double rotor_speed_max = 1200.0;  // rad/s
  double surface_limit = 0.35;      // rad, symmetric

  static constexpr double kTiltMin = -std::numbers::pi / 15.0;
  static constexpr double kTiltMax = std::numbers::pi / 2.0;

  /// Synthetic default parameter set.
  static AircraftParams eflite_like() { return {}; }

  /// Throws ConfigError naming the first broken invariant.
  void validate() const;

  /// Returns a copy with every aerodynamic coefficient scaled.
  AircraftParams with_aero_scale(double c0_scale, double c0_bar_scale, double c_lat_scale) const;
};

/// Loads every AircraftParams field from a flat key/value JSON object. Missing
/// keys keep their defaults; unknown keys are rejected.
AircraftParams aircraft_params_from_json(const nlohmann::json& doc);
AircraftParams load_aircraft_params(const std::filesystem::path& file);
nlohmann::json aircraft_params_to_json(const AircraftParams& p);

struct AirflowAngles {
  double alpha = 0.0;  // angle of attack, rad
  double beta = 0.0;   // sideslip, rad
  double speed = 0.0;  // |v_a|, m/s
  bool defined = false;
};

inline constexpr double kAirflowSpeedFloor = 1e-6;

/// Aerodynamic force in body coordinates for body air velocity v_a:
/// -(c0 v1, c_lat v2, c0_bar v3) |v_a|.
Vec3 aero_force_body(const Vec3& v_a, const AircraftParams& params);

/// Unit thrust direction (sin t, 0, -cos t) in body coordinates.
Vec3 thrust_direction(double tilt);

/// Angle of attack asin(v3/|v|) and sideslip atan(v2/|v1|). Below
/// kAirflowSpeedFloor both angles are reported undefined.
AirflowAngles airflow_angles(const Vec3& v_a);

}  // namespace vtol
