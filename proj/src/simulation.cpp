#include "vtol/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

constexpr double kPositionBound = 1e5;  // m
constexpr double kCaptureDistance = 1.0;  // m

double rms(double sum_sq, std::size_t n) { return n ? std::sqrt(sum_sq / n) : 0.0; }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2) return v[mid];
  const double hi = v[mid];
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

void put(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  line += buf;
  line += ',';
}

void put(std::string& line, const Vec3& x) {
  for (int i = 0; i < 3; ++i) put(line, x(i));
}

void put_int(std::string& line, long long x) {
  line += std::to_string(x);
  line += ',';
}

}  // namespace

nlohmann::json to_json(const Metrics& m) {
  return {{"duration", m.duration},
          {"cycles", m.cycles},
          {"success", m.success},
          {"failure_reason", m.failure_reason},
          {"path_capture_time", m.path_capture_time},
          {"cross_track_rms", m.cross_track_rms},
          {"cross_track_max", m.cross_track_max},
          {"speed_rms", m.speed_rms},
          {"speed_rms_outside_gusts", m.speed_rms_outside_gusts},
          {"max_tilt_rate", {m.max_tilt_rate[0], m.max_tilt_rate[1]}},
          {"rotor_saturation_duty", m.rotor_saturation_duty},
          {"tilt_saturation_duty", m.tilt_saturation_duty},
          {"surface_saturation_duty", m.surface_saturation_duty},
          {"estimator_error_rms",
           {m.estimator_error_rms.x(), m.estimator_error_rms.y(), m.estimator_error_rms.z()}},
          {"null_estimate_violations", m.null_estimate_violations},
          {"allocation_failures", m.allocation_failures},
          {"fallback_cycles", m.fallback_cycles},
          {"max_thrust_tilt_deg", m.max_thrust_tilt_deg},
          {"takeoff_median_tilt_deg", m.takeoff_median_tilt_deg},
          {"final_position_error", m.final_position_error},
          {"final_thrust", m.final_thrust},
          {"final_tilt", m.final_tilt}};
}

Metrics compute_metrics(const std::vector<LogRecord>& log, double control_dt) {
  if (log.empty()) throw ContractViolation("compute_metrics: empty log");
  if (!(control_dt > 0.0)) throw ContractViolation("compute_metrics: control_dt must be > 0");
  Metrics m;
  m.cycles = log.size();
  m.duration = log.size() * control_dt;

  double ct_sq = 0, sp_sq = 0, sp_out_sq = 0;
  std::size_t ct_n = 0, sp_n = 0, sp_out_n = 0;
  Vec3 est_sq = Vec3::Zero();
  std::size_t est_n = 0, rotor_sat = 0, tilt_sat = 0, surf_sat = 0;
  std::vector<double> takeoff_tilt;

  for (std::size_t n = 0; n < log.size(); ++n) {
    const LogRecord& r = log[n];
    const bool path = r.phase == MissionPhase::Path;
    if (path && m.path_capture_time < 0.0 && r.cross_track < kCaptureDistance) {
      m.path_capture_time = r.t;
    }
    const bool tracked = path ? m.path_capture_time >= 0.0 : r.phase != MissionPhase::Takeoff;
    if (tracked) {
      ct_sq += r.cross_track * r.cross_track;
      ++ct_n;
      m.cross_track_max = std::max(m.cross_track_max, r.cross_track);
    }
    if (path || r.phase == MissionPhase::Track) {
      sp_sq += r.speed_error * r.speed_error;
      ++sp_n;
      if (!r.gust) {
        sp_out_sq += r.speed_error * r.speed_error;
        ++sp_out_n;
      }
    }
    if (n > 0) {
      m.max_tilt_rate[0] =
          std::max(m.max_tilt_rate[0], std::abs(r.tilt1 - log[n - 1].tilt1) / control_dt);
      m.max_tilt_rate[1] =
          std::max(m.max_tilt_rate[1], std::abs(r.tilt2 - log[n - 1].tilt2) / control_dt);
    }
    if (r.saturation & 0b0000111u) ++rotor_sat;
    if (r.saturation & 0b0011000u) ++tilt_sat;
    if (r.saturation & 0b1100000u) ++surf_sat;
    if (r.pitot_valid) {
      est_sq += (r.v_a_hat - r.v_a_true).cwiseAbs2();
      ++est_n;
    } else if (!r.v_a_hat.isZero(0.0)) {
      ++m.null_estimate_violations;
    }
    if (!r.allocation_ok) ++m.allocation_failures;
    if (r.fallback) ++m.fallback_cycles;
    const double tilt_deg = r.tilt * 180.0 / std::numbers::pi;
    m.max_thrust_tilt_deg = std::max(m.max_thrust_tilt_deg, tilt_deg);
    if (r.phase == MissionPhase::Takeoff) takeoff_tilt.push_back(std::abs(tilt_deg));
  }
  m.cross_track_rms = rms(ct_sq, ct_n);
  m.speed_rms = rms(sp_sq, sp_n);
  m.speed_rms_outside_gusts = rms(sp_out_sq, sp_out_n);
  const double N = static_cast<double>(log.size());
  m.rotor_saturation_duty = rotor_sat / N;
  m.tilt_saturation_duty = tilt_sat / N;
  m.surface_saturation_duty = surf_sat / N;
  if (est_n) m.estimator_error_rms = (est_sq / static_cast<double>(est_n)).cwiseSqrt();
  m.takeoff_median_tilt_deg = median(std::move(takeoff_tilt));
  m.final_position_error = log.back().cross_track;
  m.final_thrust = log.back().thrust;
  m.final_tilt = log.back().tilt;
  return m;
}

RigidState initial_state(const Scenario& scenario) {
  const InitialCondition& ic = scenario.mission.initial;
  RigidState s;
  s.p = ic.position;
  s.v = ic.velocity;
  s.R = Rotation::about_axis(Vec3::UnitZ(), ic.yaw);
  if (ic.trim) {
    FrameSelector selector(scenario.controller.frame, scenario.aircraft);
    const Vec3 v_a = ic.velocity - wind_at(0.0, scenario.wind);
    const auto sel = selector.select(Vec3::Zero(), v_a, s.R, scenario.sim.control_dt);
    s.R = sel.frame.rotation();
  }
  return s;
}

RunResult run(const Scenario& scenario) {
  scenario.validate();
  RunResult result;
  const SimSettings& sim = scenario.sim;
  const double dt = sim.control_dt;
  const int substeps = sim.plant_substeps();
  const double h = dt / substeps;
  const auto cycles = static_cast<std::size_t>(std::floor(sim.duration / dt + 1e-9));
  result.log.reserve(cycles);

  const AircraftParams plant = sim.mismatch.apply(scenario.aircraft);
  Controller controller(scenario);
  RigidState s = initial_state(scenario);
  std::mt19937_64 rng(sim.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::string failure;
  for (std::size_t n = 0; n < cycles; ++n) {
    const double t = n * dt;
    const Vec3 wind = wind_at(t, scenario.wind);
    const Vec3 v_a = s.v - wind;
    const Vec3 v_a_body = s.R.matrix().transpose() * v_a;
    double pitot = v_a_body.x();
    if (sim.pitot_noise > 0.0) pitot += sim.pitot_noise * noise(rng);

    const ControlOutput out = controller.update(t, s, pitot, v_a, dt);

    LogRecord r;
    r.t = t;
    r.phase = out.phase;
    r.p = s.p;
    r.v = s.v;
    r.q = s.R.quaternion();
    r.omega = s.omega;
    r.v_a_true = v_a_body;
    r.v_a_hat = out.estimate.v_a_hat;
    r.pitot_valid = out.estimate.pitot_valid;
    r.regime = out.selection.frame.regime;
    r.lambda_val = out.selection.frame.lambda_val;
    r.alpha = out.selection.frame.alpha;
    r.thrust = out.command.thrust;
    r.tilt = out.command.tilt;
    if (out.allocation) {
      const ActuatorSet& a = out.allocation->actuators;
      r.lambda_bar = out.allocation->split.lambda_bar;
      r.tilt1 = a.tilt[0];
      r.tilt2 = a.tilt[1];
      for (int i = 0; i < 3; ++i) r.w[i] = a.w[i] / scenario.aircraft.rotor_speed_max;
      r.delta1 = a.delta[0];
      r.delta2 = a.delta[1];
      r.saturation = a.saturated.mask();
    } else {
      r.allocation_ok = false;
      if (!result.log.empty()) {
        const LogRecord& prev = result.log.back();
        r.lambda_bar = prev.lambda_bar;
        r.tilt1 = prev.tilt1;
        r.tilt2 = prev.tilt2;
      }
    }
    r.cross_track = out.cross_track;
    r.speed_error = out.speed_error;
    r.v_ref = out.v_ref;
    r.fallback = out.selection.fallback;
    r.gust = scenario.wind.gust_envelope(t) > 0.0;
    result.log.push_back(r);

    PlantInput u = out.command;
    if (sim.disturbance_torque > 0.0) {
      u.torque += sim.disturbance_torque * Vec3(unit(rng), unit(rng), unit(rng));
    }
    try {
      for (int k = 0; k < substeps; ++k) s = step(s, u, t + k * h, h, scenario.wind, plant);
      if (s.p.cwiseAbs().maxCoeff() > kPositionBound) {
        throw NumericalDivergence("position left the simulation domain");
      }
    } catch (const NumericalDivergence& e) {
      failure = e.what();
      break;
    }
  }

  if (result.log.empty()) {
    result.metrics = Metrics{};
  } else {
    result.metrics = compute_metrics(result.log, dt);
  }
  if (!failure.empty()) {
    result.metrics.success = false;
    result.metrics.failure_reason = "plant divergence: " + failure;
  }
  return result;
}

std::string csv_header() {
  return "t,phase,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,va_x,va_y,va_z,va_hat_x,va_hat_y,"
         "va_hat_z,pitot_valid,regime,lambda,lambda_bar,alpha,thrust,tilt,tilt1,tilt2,w1,w2,w3,"
         "delta1,delta2,cross_track,speed_error,v_ref,speed,airspeed,saturation,allocation_ok,"
         "fallback,gust";
}

void write_csv(std::ostream& out, const std::vector<LogRecord>& log) {
  out << "# " << kLogVersion << '\n' << csv_header() << '\n';
  std::string line;
  for (const LogRecord& r : log) {
    line.clear();
    put(line, r.t);
    put_int(line, static_cast<int>(r.phase));
    put(line, r.p);
    put(line, r.v);
    for (int i = 0; i < 4; ++i) put(line, r.q(i));
    put(line, r.omega);
    put(line, r.v_a_true);
    put(line, r.v_a_hat);
    put_int(line, r.pitot_valid);
    put_int(line, static_cast<int>(r.regime));
    put(line, r.lambda_val);
    put(line, r.lambda_bar);
    put(line, r.alpha);
    put(line, r.thrust);
    put(line, r.tilt);
    put(line, r.tilt1);
    put(line, r.tilt2);
    for (double w : r.w) put(line, w);
    put(line, r.delta1);
    put(line, r.delta2);
    put(line, r.cross_track);
    put(line, r.speed_error);
    put(line, r.v_ref);
    put(line, r.v.norm());
    put(line, r.v_a_true.norm());
    put_int(line, r.saturation);
    put_int(line, r.allocation_ok);
    put_int(line, r.fallback);
    put_int(line, r.gust);
    line.back() = '\n';
    out << line;
  }
}

std::vector<BatchEntry> run_batch(const std::filesystem::path& dir,
                                  const std::filesystem::path& out_dir, unsigned jobs) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<BatchEntry> entries;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      BatchEntry entry;
      entry.config = e.path();
      entries.push_back(std::move(entry));
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const BatchEntry& a, const BatchEntry& b) { return a.config < b.config; });
  fs::create_directories(out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      BatchEntry& entry = entries[i];
      try {
        const Scenario sc = load_scenario(entry.config);
        const RunResult res = run(sc);
        const std::string stem = entry.config.stem().string();
        std::ofstream csv(out_dir / (stem + ".csv"));
        write_csv(csv, res.log);
        std::ofstream js(out_dir / (stem + ".metrics.json"));
        js << to_json(res.metrics).dump(2) << '\n';
        entry.metrics = res.metrics;
        entry.ok = res.metrics.success;
        if (!entry.ok) entry.error = res.metrics.failure_reason;
      } catch (const std::exception& ex) {
        entry.error = ex.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(entries.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return entries;
}

}  // namespace vtol
