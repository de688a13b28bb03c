#pragma once

#include <array>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "vtol/airframe.hpp"
#include "vtol/geom3.hpp"

namespace vtol {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

struct TorqueSplitConfig {
  double delta_star = 7.0;  // m/s, surfaces unused below
  double width = 2.0;       // m/s, surfaces carry everything above delta_star + width
  double surface_speed_floor = 3.0;  // m/s, lower bound of |v_a| in the deflection map

  void validate() const;
};

/// Gamma = gamma_a (surfaces) + gamma_m (rotors).
struct TorqueSplit {
  Vec3 gamma_a = Vec3::Zero();
  Vec3 gamma_m = Vec3::Zero();
  double lambda_bar = 1.0;
};

struct SaturationFlags {
  bool rotor[3] = {false, false, false};
  bool tilt[2] = {false, false};
  bool surface[2] = {false, false};

  bool any_rotor() const { return rotor[0] || rotor[1] || rotor[2]; }
  bool any_tilt() const { return tilt[0] || tilt[1]; }
  bool any_surface() const { return surface[0] || surface[1]; }
  bool any() const { return any_rotor() || any_tilt() || any_surface(); }
  /// Bit n set for channel n in the order w1 w2 w3 tilt1 tilt2 delta1 delta2.
  unsigned mask() const;
};

struct ActuatorSet {
  double w[3] = {0.0, 0.0, 0.0};  // rotor speeds, rad/s
  double tilt[2] = {0.0, 0.0};    // front rotor tilts, rad
  double delta[2] = {0.0, 0.0};   // surface deflections, rad
  SaturationFlags saturated;
};

/// Wrench reproduced by a (possibly saturated) actuator set.
struct AchievedWrench {
  double thrust = 0.0;
  double tilt = 0.0;
  Vec3 gamma_m = Vec3::Zero();
  Vec3 gamma_a = Vec3::Zero();
};

struct AllocationResult {
  ActuatorSet actuators;
  TorqueSplit split;
  /// Rotor torque actually sent to the mixer (gamma_m plus the surface yaw
  /// share that the two surfaces cannot produce).
  Vec3 rotor_torque = Vec3::Zero();
  AchievedWrench achieved;
  /// |achieved - demanded| over (T sin, T cos, Gamma).
  double wrench_mismatch = 0.0;
};

/// Clamps value into [lo, hi]; flag is set only for values strictly outside.
double clamp_flagged(double value, double lo, double hi, bool& flag);

/// Smooth torque hand-over from rotors (low airspeed) to surfaces.
TorqueSplit split_torque(const Vec3& gamma, double airspeed, double delta_star, double width);

/// delta = A gamma_a / max(|v_a|, floor)^2, clamped to +-surface_limit.
std::array<double, 2> surface_deflections(const Vec3& gamma_a, double airspeed,
                                          const AircraftParams& params, double speed_floor,
                                          bool flags[2]);

/// Rotor mixing matrix mapping the rotor thrust components
/// (u1 cos t1, u2 cos t2, u1 sin t1, u2 sin t2, u3) to (T sin, T cos, Gamma_m).
Mat5 mixer_matrix(const AircraftParams& params);

/// Forward map of the mixer for actuator values.
Vec5 rotor_wrench(const double w[3], const double tilt[2], const AircraftParams& params);

/// Solves the 5x5 mixer for rotor speeds and tilts, then saturates. Throws
/// AllocationInfeasible when the rear rotor would need negative thrust or a
/// front rotor would tilt beyond +-pi/2.
ActuatorSet rotor_solve(double thrust, double tilt, const Vec3& gamma_m,
                        const AircraftParams& params);

/// Split, surface deflections and rotor mixing, with the achieved wrench
/// recomputed after saturation.
AllocationResult allocate(double thrust, double tilt, const Vec3& gamma, double airspeed,
                          const AircraftParams& params, const TorqueSplitConfig& split = {});

nlohmann::json to_json(const AllocationResult& r, const AircraftParams& params);

}  // namespace vtol
