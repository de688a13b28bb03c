#include "vtol/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vtol/blend.hpp"
#include "vtol/errors.hpp"

namespace vtol {

void TorqueSplitConfig::validate() const {
  if (!(delta_star > 0.0 && width > 0.0 && surface_speed_floor > 0.0)) {
    throw ConfigError("torque split: delta_star, width and surface_speed_floor must be > 0");
  }
}

unsigned SaturationFlags::mask() const {
  unsigned m = 0;
  const bool bits[7] = {rotor[0], rotor[1], rotor[2], tilt[0], tilt[1], surface[0], surface[1]};
  for (unsigned n = 0; n < 7; ++n) {
    if (bits[n]) m |= 1u << n;
  }
  return m;
}

double clamp_flagged(double value, double lo, double hi, bool& flag) {
  if (value < lo) {
    flag = true;
    return lo;
  }
  if (value > hi) {
    flag = true;
    return hi;
  }
  flag = false;
  return value;
}

TorqueSplit split_torque(const Vec3& gamma, double airspeed, double delta_star, double width) {
  if (!(delta_star > 0.0 && width > 0.0)) {
    throw ContractViolation("split_torque requires delta_star > 0 and width > 0");
  }
  TorqueSplit s;
  s.lambda_bar = smooth_step_down(airspeed, delta_star, delta_star + width);
  s.gamma_m = s.lambda_bar * gamma;
  s.gamma_a = gamma - s.gamma_m;
  return s;
}

std::array<double, 2> surface_deflections(const Vec3& gamma_a, double airspeed,
                                          const AircraftParams& params, double speed_floor,
                                          bool flags[2]) {
  const double v = std::max(airspeed, speed_floor);
  const Eigen::Vector2d raw = params.surface_map * gamma_a / (v * v);
  std::array<double, 2> out{};
  for (int n = 0; n < 2; ++n) {
    out[n] = clamp_flagged(raw(n), -params.surface_limit, params.surface_limit, flags[n]);
  }
  return out;
}

Mat5 mixer_matrix(const AircraftParams& p) {
  Mat5 D;
  D << 0.0, 0.0, 1.0, 1.0, 0.0,
       1.0, 1.0, 0.0, 0.0, 1.0,
       -p.r2, p.r2, p.nu12, -p.nu12, 0.0,
       p.r1, p.r1, 0.0, 0.0, -p.r3,
       -p.nu12, p.nu12, -p.r2, p.r2, -p.nu3;
  return D;
}

Vec5 rotor_wrench(const double w[3], const double tilt[2], const AircraftParams& params) {
  const double u1 = params.mu12 * w[0] * w[0];
  const double u2 = params.mu12 * w[1] * w[1];
  const double u3 = params.mu3 * w[2] * w[2];
  Vec5 x;
  x << u1 * std::cos(tilt[0]), u2 * std::cos(tilt[1]), u1 * std::sin(tilt[0]),
      u2 * std::sin(tilt[1]), u3;
  return mixer_matrix(params) * x;
}

ActuatorSet rotor_solve(double thrust, double tilt, const Vec3& gamma_m,
                        const AircraftParams& params) {
  if (!(thrust >= 0.0)) {
    throw ContractViolation("rotor_solve requires thrust >= 0");
  }
  const Mat5 D = mixer_matrix(params);
  Eigen::PartialPivLU<Mat5> lu(D);
  if (!(std::abs(lu.determinant()) > 1e-9)) {
    throw ContractViolation("rotor mixing matrix is singular for these parameters");
  }
  Vec5 rhs;
  rhs << thrust * std::sin(tilt), thrust * std::cos(tilt), gamma_m;
  Vec5 X = lu.solve(rhs);

  // Round-off sized negatives are treated as zero.
  const double tol = 1e-12 * std::max(1.0, rhs.norm());
  if (X(4) < -tol) {
    throw AllocationInfeasible("rear rotor would need negative thrust (X5 = " +
                               std::to_string(X(4)) + ")");
  }
  if (X(0) < -tol || X(1) < -tol) {
    throw AllocationInfeasible("front rotor tilt beyond +-pi/2 (X1 = " + std::to_string(X(0)) +
                               ", X2 = " + std::to_string(X(1)) + ")");
  }
  X(0) = std::max(X(0), 0.0);
  X(1) = std::max(X(1), 0.0);
  X(4) = std::max(X(4), 0.0);

  const double load[3] = {std::hypot(X(0), X(2)), std::hypot(X(1), X(3)), X(4)};
  const double mu[3] = {params.mu12, params.mu12, params.mu3};
  const double raw_tilt[2] = {std::atan2(X(2), X(0)), std::atan2(X(3), X(1))};

  ActuatorSet out;
  for (int n = 0; n < 3; ++n) {
    out.w[n] = clamp_flagged(std::sqrt(load[n] / mu[n]), params.rotor_speed_min,
                             params.rotor_speed_max, out.saturated.rotor[n]);
  }
  for (int n = 0; n < 2; ++n) {
    out.tilt[n] = clamp_flagged(raw_tilt[n], AircraftParams::kTiltMin, AircraftParams::kTiltMax,
                                out.saturated.tilt[n]);
  }
  return out;
}

AllocationResult allocate(double thrust, double tilt, const Vec3& gamma, double airspeed,
                          const AircraftParams& params, const TorqueSplitConfig& split) {
  AllocationResult r;
  r.split = split_torque(gamma, airspeed, split.delta_star, split.width);

  // The two surfaces act on roll and pitch only; the yaw share stays on the rotors.
  r.rotor_torque = r.split.gamma_m;
  r.rotor_torque.z() += r.split.gamma_a.z();
  Vec3 surface_torque = r.split.gamma_a;
  surface_torque.z() = 0.0;

  const auto delta = surface_deflections(surface_torque, airspeed, params,
                                         split.surface_speed_floor, r.actuators.saturated.surface);
  const ActuatorSet rotors = rotor_solve(thrust, tilt, r.rotor_torque, params);
  for (int n = 0; n < 3; ++n) {
    r.actuators.w[n] = rotors.w[n];
    r.actuators.saturated.rotor[n] = rotors.saturated.rotor[n];
  }
  for (int n = 0; n < 2; ++n) {
    r.actuators.tilt[n] = rotors.tilt[n];
    r.actuators.saturated.tilt[n] = rotors.saturated.tilt[n];
    r.actuators.delta[n] = delta[n];
  }

  const Vec5 achieved = rotor_wrench(r.actuators.w, r.actuators.tilt, params);
  r.achieved.thrust = std::hypot(achieved(0), achieved(1));
  r.achieved.tilt = std::atan2(achieved(0), achieved(1));
  r.achieved.gamma_m = achieved.tail<3>();
  const double v = std::max(airspeed, split.surface_speed_floor);
  const Eigen::Vector2d dv(r.actuators.delta[0], r.actuators.delta[1]);
  r.achieved.gamma_a =
      params.surface_map.completeOrthogonalDecomposition().pseudoInverse() * dv * (v * v);

  Eigen::Matrix<double, 6, 1> demanded, got;
  demanded << thrust * std::sin(tilt), thrust * std::cos(tilt), gamma;
  got << achieved(0), achieved(1), r.achieved.gamma_m + r.achieved.gamma_a;
  r.wrench_mismatch = (got - demanded).norm();
  return r;
}

nlohmann::json to_json(const AllocationResult& r, const AircraftParams& params) {
  const ActuatorSet& a = r.actuators;
  nlohmann::json j;
  j["w"] = {a.w[0], a.w[1], a.w[2]};
  j["w_normalized"] = {a.w[0] / params.rotor_speed_max, a.w[1] / params.rotor_speed_max,
                       a.w[2] / params.rotor_speed_max};
  j["tilt"] = {a.tilt[0], a.tilt[1]};
  j["delta"] = {a.delta[0], a.delta[1]};
  j["saturated"] = {
      {"rotor", {a.saturated.rotor[0], a.saturated.rotor[1], a.saturated.rotor[2]}},
      {"tilt", {a.saturated.tilt[0], a.saturated.tilt[1]}},
      {"surface", {a.saturated.surface[0], a.saturated.surface[1]}},
      {"any", a.saturated.any()}};
  j["split"] = {{"gamma_a", {r.split.gamma_a.x(), r.split.gamma_a.y(), r.split.gamma_a.z()}},
                {"gamma_m", {r.split.gamma_m.x(), r.split.gamma_m.y(), r.split.gamma_m.z()}},
                {"lambda_bar", r.split.lambda_bar}};
  j["achieved"] = {
      {"thrust", r.achieved.thrust},
      {"tilt", r.achieved.tilt},
      {"gamma_m", {r.achieved.gamma_m.x(), r.achieved.gamma_m.y(), r.achieved.gamma_m.z()}},
      {"gamma_a", {r.achieved.gamma_a.x(), r.achieved.gamma_a.y(), r.achieved.gamma_a.z()}}};
  j["wrench_mismatch"] = r.wrench_mismatch;
  return j;
}

}  // namespace vtol
