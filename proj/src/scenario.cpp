#include "vtol/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

// Reads fields of one JSON object and rejects the keys nobody asked for.
class Reader {
 public:
  Reader(const json& doc, std::string context) : doc_(doc), ctx_(std::move(context)) {
    require(doc_.is_object(), ctx_ + ": expected an object");
  }

  bool has(const char* key) const { return doc_.contains(key); }

  void num(const char* key, double& out) {
    if (const json* v = take(key)) {
      require(v->is_number(), ctx_ + "." + key + ": expected a number");
      out = v->get<double>();
      require(std::isfinite(out), ctx_ + "." + key + ": must be finite");
    }
  }

  void u64(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      require(v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0),
              ctx_ + "." + key + ": expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void flag(const char* key, bool& out) {
    if (const json* v = take(key)) {
      require(v->is_boolean(), ctx_ + "." + key + ": expected a boolean");
      out = v->get<bool>();
    }
  }

  void str(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      require(v->is_string(), ctx_ + "." + key + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void vec(const char* key, Vec3& out) {
    if (const json* v = take(key)) {
      require(v->is_array() && v->size() == 3, ctx_ + "." + key + ": expected [x, y, z]");
      for (int i = 0; i < 3; ++i) {
        require((*v)[i].is_number(), ctx_ + "." + key + ": expected numbers");
        out(i) = (*v)[i].get<double>();
      }
      require(out.allFinite(), ctx_ + "." + key + ": must be finite");
    }
  }

  const json* sub(const char* key) { return take(key); }

  std::string child(const char* key) const { return ctx_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!used_.count(key)) throw ConfigError(ctx_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json* take(const char* key) {
    auto it = doc_.find(key);
    if (it == doc_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  const json& doc_;
  std::string ctx_;
  std::set<std::string> used_;
};

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

WindProfile wind_from_json(const json& doc) {
  WindProfile w;
  Reader r(doc, "wind");
  r.vec("steady", w.steady);
  r.num("gust_magnitude", w.gust_magnitude);
  r.num("gust_duration", w.gust_duration);
  r.num("gust_period", w.gust_period);
  r.vec("gust_direction", w.gust_direction);
  r.num("ramp_time", w.ramp_time);
  r.finish();
  return w;
}

MissionConfig mission_from_json(const json& doc) {
  MissionConfig m;
  Reader r(doc, "mission");
  std::string kind = to_string(m.kind);
  r.str("kind", kind);
  if (kind == "hover") {
    m.kind = MissionKind::Hover;
  } else if (kind == "circle") {
    m.kind = MissionKind::Circle;
  } else if (kind == "line") {
    m.kind = MissionKind::Line;
  } else {
    throw ConfigError("mission.kind: expected hover, circle or line");
  }
  if (const json* init = r.sub("initial")) {
    Reader ri(*init, r.child("initial"));
    ri.vec("position", m.initial.position);
    ri.vec("velocity", m.initial.velocity);
    double yaw_deg = m.initial.yaw * 180.0 / std::numbers::pi;
    ri.num("yaw_deg", yaw_deg);
    m.initial.yaw = yaw_deg * std::numbers::pi / 180.0;
    ri.flag("trim", m.initial.trim);
    ri.finish();
  }
  r.vec("hover_point", m.hover_point);
  r.num("takeoff_duration", m.takeoff_duration);
  r.num("takeoff_altitude", m.takeoff_altitude);
  r.num("circle_radius", m.circle_radius);
  double incl_deg = m.circle_inclination * 180.0 / std::numbers::pi;
  r.num("circle_inclination_deg", incl_deg);
  m.circle_inclination = incl_deg * std::numbers::pi / 180.0;
  if (const json* ramp = r.sub("speed_ramp")) {
    Reader rr(*ramp, r.child("speed_ramp"));
    rr.num("v_start", m.ramp.v_start);
    rr.num("v_end", m.ramp.v_end);
    rr.num("ramp_rate", m.ramp.ramp_rate);
    rr.finish();
  }
  r.vec("line_direction", m.line_direction);
  r.num("line_speed", m.line_speed);
  r.finish();
  return m;
}

ControllerConfig controller_from_json(const json& doc) {
  ControllerConfig c;
  Reader r(doc, "controller");
  if (const json* g = r.sub("guidance")) {
    Reader rg(*g, r.child("guidance"));
    rg.num("k_p", c.guidance.k_p);
    rg.num("k_v", c.guidance.k_v);
    rg.num("k_s", c.guidance.k_s);
    rg.num("k_h", c.guidance.k_h);
    rg.num("k_c", c.guidance.k_c);
    rg.num("d_sat", c.guidance.d_sat);
    rg.num("xi_max", c.guidance.xi_max);
    rg.num("heading_floor", c.guidance.heading_floor);
    rg.num("low_speed_heading", c.guidance.low_speed_heading);
    rg.finish();
  }
  if (const json* f = r.sub("frame")) {
    Reader rf(*f, r.child("frame"));
    rf.num("sigma_m", c.frame.sigma_m);
    rf.num("sigma_M", c.frame.sigma_M);
    rf.num("sigma", c.frame.sigma);
    rf.num("eps", c.frame.eps);
    rf.num("theta_d", c.frame.theta_d);
    rf.num("i_d_time_constant", c.frame.i_d_time_constant);
    rf.num("regime_hysteresis", c.frame.regime_hysteresis);
    rf.num("eps_cross_rel", c.frame.eps_cross_rel);
    std::string policy = "min_thrust";
    rf.str("policy", policy);
    if (policy == "min_thrust") {
      c.frame.policy = SecondaryPolicy::MinThrust;
    } else if (policy == "tilt_schedule") {
      c.frame.policy = SecondaryPolicy::TiltSchedule;
    } else {
      throw ConfigError("controller.frame.policy: expected min_thrust or tilt_schedule");
    }
    if (const json* sched = rf.sub("tilt_schedule")) {
      require(sched->is_array(), "controller.frame.tilt_schedule: expected [[speed, tilt], ...]");
      for (const auto& row : *sched) {
        require(row.is_array() && row.size() == 2 && row[0].is_number() && row[1].is_number(),
                "controller.frame.tilt_schedule: expected [speed, tilt] pairs");
        c.frame.tilt_schedule.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
    }
    rf.finish();
  }
  if (const json* g = r.sub("rate")) {
    Reader rg(*g, r.child("rate"));
    rg.num("k_i", c.rate.k_i);
    rg.num("k_j", c.rate.k_j);
    rg.num("k_k", c.rate.k_k);
    rg.vec("k_gamma", c.rate.k_gamma);
    rg.finish();
  }
  std::string mode = "simple";
  r.str("torque_mode", mode);
  if (mode == "full") {
    c.torque_mode = TorqueMode::Full;
  } else if (mode == "simple") {
    c.torque_mode = TorqueMode::Simple;
  } else {
    throw ConfigError("controller.torque_mode: expected simple or full");
  }
  if (const json* s = r.sub("split")) {
    Reader rs(*s, r.child("split"));
    rs.num("delta_star", c.split.delta_star);
    rs.num("width", c.split.width);
    rs.num("surface_speed_floor", c.split.surface_speed_floor);
    rs.finish();
  }
  if (const json* e = r.sub("estimator")) {
    Reader re(*e, r.child("estimator"));
    re.num("pitot_min_rise", c.estimator.pitot_min_rise);
    re.num("pitot_min_fall", c.estimator.pitot_min_fall);
    re.num("lateral_gain", c.estimator.lateral_gain);
    re.finish();
  }
  r.num("frame_rate_time_constant", c.frame_rate_time_constant);
  r.num("torque_derivative_time_constant", c.torque_derivative_time_constant);
  r.flag("use_true_airspeed", c.use_true_airspeed);
  r.finish();
  return c;
}

SimSettings sim_from_json(const json& doc) {
  SimSettings s;
  Reader r(doc, "sim");
  r.num("duration", s.duration);
  r.num("plant_dt", s.plant_dt);
  r.num("control_dt", s.control_dt);
  r.u64("seed", s.seed);
  r.num("pitot_noise", s.pitot_noise);
  r.num("disturbance_torque", s.disturbance_torque);
  if (const json* m = r.sub("mismatch")) {
    Reader rm(*m, r.child("mismatch"));
    rm.num("mass", s.mismatch.mass);
    rm.num("inertia", s.mismatch.inertia);
    rm.num("aero", s.mismatch.aero);
    rm.finish();
  }
  r.finish();
  return s;
}

}  // namespace

std::string to_string(MissionKind k) {
  switch (k) {
    case MissionKind::Hover: return "hover";
    case MissionKind::Circle: return "circle";
    case MissionKind::Line: return "line";
  }
  return "unknown";
}

void MissionConfig::validate() const {
  require(initial.position.allFinite() && initial.velocity.allFinite() &&
              std::isfinite(initial.yaw),
          "mission.initial: must be finite");
  require(hover_point.allFinite(), "mission.hover_point: must be finite");
  require(takeoff_duration > 0.0, "mission.takeoff_duration: must be > 0");
  require(takeoff_altitude >= 0.0, "mission.takeoff_altitude: must be >= 0");
  require(circle_radius > 0.0, "mission.circle_radius: must be > 0");
  require(std::abs(circle_inclination) < std::numbers::pi / 2,
          "mission.circle_inclination_deg: must lie in (-90, 90)");
  ramp.validate();
  require(line_direction.norm() > 1e-9, "mission.line_direction: must be nonzero");
  require(line_speed >= 0.0, "mission.line_speed: must be >= 0");
}

CirclePath MissionConfig::circle() const {
  const double c = std::cos(circle_inclination);
  const double s = std::sin(circle_inclination);
  CirclePath path;
  path.radius = circle_radius;
  path.center = takeoff_top() + circle_radius * Vec3(0.0, c, -s);
  path.normal = Vec3(0.0, -s, -c);
  return path;
}

void ControllerConfig::validate() const {
  guidance.validate();
  frame.validate();
  rate.validate();
  split.validate();
  estimator.validate();
  require(frame_rate_time_constant >= 0.0, "controller.frame_rate_time_constant: must be >= 0");
  require(torque_derivative_time_constant >= 0.0,
          "controller.torque_derivative_time_constant: must be >= 0");
}

void PlantMismatch::validate() const {
  require(mass > 0.0 && inertia > 0.0 && aero > 0.0, "sim.mismatch: factors must be > 0");
}

AircraftParams PlantMismatch::apply(const AircraftParams& model) const {
  AircraftParams p = model.with_aero_scale(aero, aero, aero);
  p.mass *= mass;
  p.inertia *= inertia;
  return p;
}

void SimSettings::validate() const {
  require(duration >= 0.0, "sim.duration: must be >= 0");
  require(plant_dt > 0.0 && plant_dt <= kMaxPlantStep, "sim.plant_dt: must lie in (0, 0.02]");
  require(control_dt >= plant_dt, "sim.control_dt: must be >= plant_dt");
  const double ratio = control_dt / plant_dt;
  require(std::abs(ratio - std::round(ratio)) < 1e-9,
          "sim.control_dt: must be an integer multiple of plant_dt");
  require(pitot_noise >= 0.0, "sim.pitot_noise: must be >= 0");
  require(disturbance_torque >= 0.0, "sim.disturbance_torque: must be >= 0");
  mismatch.validate();
}

int SimSettings::plant_substeps() const {
  return static_cast<int>(std::lround(control_dt / plant_dt));
}

void Scenario::validate() const {
  aircraft.validate();
  wind.validate();
  mission.validate();
  controller.validate();
  sim.validate();
}

Scenario Scenario::hover() {
  Scenario s;
  s.name = "hover";
  s.mission.kind = MissionKind::Hover;
  s.mission.hover_point = Vec3(0.0, 0.0, -10.0);
  s.mission.initial.position = Vec3(0.5, 0.0, -10.0);
  s.sim.duration = 30.0;
  return s;
}

Scenario Scenario::circle_mission() {
  Scenario s;
  s.name = "circle_mission";
  s.wind = WindProfile::circle_mission();
  s.mission.kind = MissionKind::Circle;
  s.mission.initial.yaw = std::numbers::pi;
  s.sim.duration = 110.0;
  return s;
}

Scenario Scenario::cruise() {
  Scenario s;
  s.name = "cruise";
  s.wind.steady = Vec3(3.0, 0.0, 0.0);
  s.mission.kind = MissionKind::Line;
  s.mission.line_direction = -Vec3::UnitX();
  s.mission.line_speed = 9.0;
  s.mission.initial.position = Vec3(0.0, 0.0, -20.0);
  s.mission.initial.velocity = Vec3(-9.0, 0.0, 0.0);
  s.mission.initial.yaw = std::numbers::pi;
  s.mission.initial.trim = true;
  s.sim.duration = 10.0;
  return s;
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  Scenario s;
  Reader r(doc, "scenario");
  r.str("name", s.name);
  if (const json* a = r.sub("aircraft")) {
    if (a->is_string()) {
      std::filesystem::path p = a->get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      s.aircraft = load_aircraft_params(p);
    } else {
      s.aircraft = aircraft_params_from_json(*a);
    }
  }
  if (const json* w = r.sub("wind")) s.wind = wind_from_json(*w);
  if (const json* m = r.sub("mission")) s.mission = mission_from_json(*m);
  if (const json* c = r.sub("controller")) s.controller = controller_from_json(*c);
  if (const json* m = r.sub("sim")) s.sim = sim_from_json(*m);
  r.finish();
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + file.string() + ": " + e.what());
  }
  return scenario_from_json(doc, file.parent_path());
}

json scenario_to_json(const Scenario& s) {
  json sched = json::array();
  for (const auto& [v, t] : s.controller.frame.tilt_schedule) sched.push_back({v, t});
  const auto& c = s.controller;
  const auto& m = s.mission;
  return {
      {"name", s.name},
      {"aircraft", aircraft_params_to_json(s.aircraft)},
      {"wind",
       {{"steady", vec_json(s.wind.steady)},
        {"gust_magnitude", s.wind.gust_magnitude},
        {"gust_duration", s.wind.gust_duration},
        {"gust_period", s.wind.gust_period},
        {"gust_direction", vec_json(s.wind.gust_direction)},
        {"ramp_time", s.wind.ramp_time}}},
      {"mission",
       {{"kind", to_string(m.kind)},
        {"initial",
         {{"position", vec_json(m.initial.position)},
          {"velocity", vec_json(m.initial.velocity)},
          {"yaw_deg", m.initial.yaw * 180.0 / std::numbers::pi},
          {"trim", m.initial.trim}}},
        {"hover_point", vec_json(m.hover_point)},
        {"takeoff_duration", m.takeoff_duration},
        {"takeoff_altitude", m.takeoff_altitude},
        {"circle_radius", m.circle_radius},
        {"circle_inclination_deg", m.circle_inclination * 180.0 / std::numbers::pi},
        {"speed_ramp",
         {{"v_start", m.ramp.v_start}, {"v_end", m.ramp.v_end}, {"ramp_rate", m.ramp.ramp_rate}}},
        {"line_direction", vec_json(m.line_direction)},
        {"line_speed", m.line_speed}}},
      {"controller",
       {{"guidance",
         {{"k_p", c.guidance.k_p},
          {"k_v", c.guidance.k_v},
          {"k_s", c.guidance.k_s},
          {"k_h", c.guidance.k_h},
          {"k_c", c.guidance.k_c},
          {"d_sat", c.guidance.d_sat},
          {"xi_max", c.guidance.xi_max},
          {"heading_floor", c.guidance.heading_floor},
          {"low_speed_heading", c.guidance.low_speed_heading}}},
        {"frame",
         {{"sigma_m", c.frame.sigma_m},
          {"sigma_M", c.frame.sigma_M},
          {"sigma", c.frame.sigma},
          {"eps", c.frame.eps},
          {"theta_d", c.frame.theta_d},
          {"i_d_time_constant", c.frame.i_d_time_constant},
          {"regime_hysteresis", c.frame.regime_hysteresis},
          {"eps_cross_rel", c.frame.eps_cross_rel},
          {"policy", c.frame.policy == SecondaryPolicy::MinThrust ? "min_thrust" : "tilt_schedule"},
          {"tilt_schedule", sched}}},
        {"rate",
         {{"k_i", c.rate.k_i},
          {"k_j", c.rate.k_j},
          {"k_k", c.rate.k_k},
          {"k_gamma", vec_json(c.rate.k_gamma)}}},
        {"torque_mode", c.torque_mode == TorqueMode::Full ? "full" : "simple"},
        {"split",
         {{"delta_star", c.split.delta_star},
          {"width", c.split.width},
          {"surface_speed_floor", c.split.surface_speed_floor}}},
        {"estimator",
         {{"pitot_min_rise", c.estimator.pitot_min_rise},
          {"pitot_min_fall", c.estimator.pitot_min_fall},
          {"lateral_gain", c.estimator.lateral_gain}}},
        {"frame_rate_time_constant", c.frame_rate_time_constant},
        {"torque_derivative_time_constant", c.torque_derivative_time_constant},
        {"use_true_airspeed", c.use_true_airspeed}}},
      {"sim",
       {{"duration", s.sim.duration},
        {"plant_dt", s.sim.plant_dt},
        {"control_dt", s.sim.control_dt},
        {"seed", s.sim.seed},
        {"pitot_noise", s.sim.pitot_noise},
        {"disturbance_torque", s.sim.disturbance_torque},
        {"mismatch",
         {{"mass", s.sim.mismatch.mass},
          {"inertia", s.sim.mismatch.inertia},
          {"aero", s.sim.mismatch.aero}}}}},
  };
}

}  // namespace vtol
