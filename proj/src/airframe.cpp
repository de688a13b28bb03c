#include "vtol/airframe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <string>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ConfigError("aircraft parameters: " + what);
  }
}

// Scalar accessors keyed by the flat document names.
std::map<std::string, std::function<double&(AircraftParams&)>> field_table() {
  return {
      {"mass", [](AircraftParams& p) -> double& { return p.mass; }},
      {"g0", [](AircraftParams& p) -> double& { return p.g0; }},
      {"Jxx", [](AircraftParams& p) -> double& { return p.inertia(0, 0); }},
      {"Jyy", [](AircraftParams& p) -> double& { return p.inertia(1, 1); }},
      {"Jzz", [](AircraftParams& p) -> double& { return p.inertia(2, 2); }},
      {"Jxy", [](AircraftParams& p) -> double& { return p.inertia(0, 1); }},
      {"Jxz", [](AircraftParams& p) -> double& { return p.inertia(0, 2); }},
      {"Jyz", [](AircraftParams& p) -> double& { return p.inertia(1, 2); }},
      {"c0", [](AircraftParams& p) -> double& { return p.c0; }},
      {"c0_bar", [](AircraftParams& p) -> double& { return p.c0_bar; }},
      {"c_lat", [](AircraftParams& p) -> double& { return p.c_lat; }},
      {"mu12", [](AircraftParams& p) -> double& { return p.mu12; }},
      {"mu3", [](AircraftParams& p) -> double& { return p.mu3; }},
      {"r1", [](AircraftParams& p) -> double& { return p.r1; }},
      {"r2", [](AircraftParams& p) -> double& { return p.r2; }},
      {"r3", [](AircraftParams& p) -> double& { return p.r3; }},
      {"nu12", [](AircraftParams& p) -> double& { return p.nu12; }},
      {"nu3", [](AircraftParams& p) -> double& { return p.nu3; }},
      {"A11", [](AircraftParams& p) -> double& { return p.surface_map(0, 0); }},
      {"A12", [](AircraftParams& p) -> double& { return p.surface_map(0, 1); }},
      {"A13", [](AircraftParams& p) -> double& { return p.surface_map(0, 2); }},
      {"A21", [](AircraftParams& p) -> double& { return p.surface_map(1, 0); }},
      {"A22", [](AircraftParams& p) -> double& { return p.surface_map(1, 1); }},
      {"A23", [](AircraftParams& p) -> double& { return p.surface_map(1, 2); }},
      {"rotor_speed_min", [](AircraftParams& p) -> double& { return p.rotor_speed_min; }},
      {"rotor_speed_max", [](AircraftParams& p) -> double& { return p.rotor_speed_max; }},
      {"surface_limit", [](AircraftParams& p) -> double& { return p.surface_limit; }},
  };
}

}  // namespace

void AircraftParams::validate() const {
  require(std::isfinite(mass) && mass > 0.0, "mass must be > 0");
  require(std::isfinite(g0) && g0 > 0.0, "g0 must be > 0");
  require(inertia.allFinite(), "inertia must be finite");
  require((inertia - inertia.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
          "inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  require(eig.eigenvalues().minCoeff() > 0.0, "inertia must be positive definite");
  for (auto [name, value] : {std::pair{"c0", c0}, {"c0_bar", c0_bar}, {"c_lat", c_lat},
                             {"mu12", mu12}, {"mu3", mu3}, {"r1", r1}, {"r2", r2},
                             {"r3", r3}, {"nu12", nu12}, {"nu3", nu3}}) {
    require(std::isfinite(value) && value > 0.0, std::string(name) + " must be > 0");
  }
  require(surface_map.allFinite(), "surface map must be finite");
  require(rotor_speed_min >= 0.0 && rotor_speed_max > rotor_speed_min,
          "rotor speed limits must satisfy 0 <= min < max");
  require(surface_limit > 0.0, "surface_limit must be > 0");
}

AircraftParams AircraftParams::with_aero_scale(double c0_scale, double c0_bar_scale,
                                               double c_lat_scale) const {
  AircraftParams p = *this;
  p.c0 *= c0_scale;
  p.c0_bar *= c0_bar_scale;
  p.c_lat *= c_lat_scale;
  return p;
}

AircraftParams aircraft_params_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("aircraft parameters must be a JSON object");
  }
  AircraftParams p;
  const auto table = field_table();
  for (const auto& [key, value] : doc.items()) {
    auto it = table.find(key);
    if (it == table.end()) {
      throw ConfigError("aircraft parameters: unknown key '" + key + "'");
    }
    if (!value.is_number()) {
      throw ConfigError("aircraft parameters: '" + key + "' must be a number");
    }
    it->second(p) = value.get<double>();
  }
  // Off-diagonal inertia entries are given once.
  p.inertia(1, 0) = p.inertia(0, 1);
  p.inertia(2, 0) = p.inertia(0, 2);
  p.inertia(2, 1) = p.inertia(1, 2);
  p.validate();
  return p;
}

AircraftParams load_aircraft_params(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open aircraft parameter file " + file.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("aircraft parameter file " + file.string() + ": " + e.what());
  }
  return aircraft_params_from_json(doc);
}

nlohmann::json aircraft_params_to_json(const AircraftParams& p) {
  nlohmann::json doc;
  AircraftParams copy = p;
  for (const auto& [key, get] : field_table()) {
    doc[key] = get(copy);
  }
  return doc;
}

Vec3 aero_force_body(const Vec3& v_a, const AircraftParams& params) {
  const double speed = v_a.norm();
  return -speed * Vec3(params.c0 * v_a.x(), params.c_lat * v_a.y(), params.c0_bar * v_a.z());
}

Vec3 thrust_direction(double tilt) { return {std::sin(tilt), 0.0, -std::cos(tilt)}; }

AirflowAngles airflow_angles(const Vec3& v_a) {
  AirflowAngles out;
  out.speed = v_a.norm();
  if (out.speed < kAirflowSpeedFloor) {
    return out;
  }
  out.alpha = std::asin(std::clamp(v_a.z() / out.speed, -1.0, 1.0));
  out.beta = std::atan2(v_a.y(), std::abs(v_a.x()));
  out.defined = true;
  return out;
}

}  // namespace vtol
