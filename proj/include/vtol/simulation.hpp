#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtol/controller.hpp"
#include "vtol/scenario.hpp"

namespace vtol {

inline constexpr const char* kLogVersion = "vtol-log v1";

/// One control cycle.
struct LogRecord {
  double t = 0.0;
  MissionPhase phase = MissionPhase::Hold;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Eigen::Vector4d q = Eigen::Vector4d(1, 0, 0, 0);  // w x y z
  Vec3 omega = Vec3::Zero();
  Vec3 v_a_true = Vec3::Zero();  // body
  Vec3 v_a_hat = Vec3::Zero();   // body
  bool pitot_valid = false;
  FlightRegime regime = FlightRegime::LowSpeed;
  double lambda_val = 1.0;
  double lambda_bar = 1.0;
  double alpha = 0.0;
  double thrust = 0.0;
  double tilt = 0.0;
  double tilt1 = 0.0;
  double tilt2 = 0.0;
  double w[3] = {0.0, 0.0, 0.0};  // rotor speeds over rotor_speed_max
  double delta1 = 0.0;
  double delta2 = 0.0;
  double cross_track = 0.0;
  double speed_error = 0.0;
  double v_ref = 0.0;
  unsigned saturation = 0;  // SaturationFlags::mask()
  bool allocation_ok = true;
  bool fallback = false;
  bool gust = false;
};

struct Metrics {
  double duration = 0.0;
  std::size_t cycles = 0;
  bool success = true;
  std::string failure_reason;
  double path_capture_time = -1.0;  // first path-phase time with cross-track < 1 m
  double cross_track_rms = 0.0;     // path phase after capture (or hold/track phase)
  double cross_track_max = 0.0;
  double speed_rms = 0.0;
  double speed_rms_outside_gusts = 0.0;
  double max_tilt_rate[2] = {0.0, 0.0};  // rad/s
  double rotor_saturation_duty = 0.0;
  double tilt_saturation_duty = 0.0;
  double surface_saturation_duty = 0.0;
  Vec3 estimator_error_rms = Vec3::Zero();  // per body axis, pitot-valid cycles
  std::size_t null_estimate_violations = 0;
  std::size_t allocation_failures = 0;
  std::size_t fallback_cycles = 0;
  double max_thrust_tilt_deg = 0.0;
  double takeoff_median_tilt_deg = 0.0;
  double final_position_error = 0.0;
  double final_thrust = 0.0;
  double final_tilt = 0.0;
};

nlohmann::json to_json(const Metrics& m);

/// Summary statistics of a non-empty log. Throws ContractViolation on an
/// empty log.
Metrics compute_metrics(const std::vector<LogRecord>& log, double control_dt);

struct RunResult {
  std::vector<LogRecord> log;
  Metrics metrics;
};

/// Closed-loop run: RK4 plant at sim.plant_dt, controller held over each
/// control_dt. A diverging plant ends the run with success = false and the
/// records up to the last good cycle.
RunResult run(const Scenario& scenario);

/// Initial plant state of a scenario (trimmed when requested).
RigidState initial_state(const Scenario& scenario);

std::string csv_header();
void write_csv(std::ostream& out, const std::vector<LogRecord>& log);

struct BatchEntry {
  std::filesystem::path config;
  bool ok = false;
  std::string error;
  Metrics metrics;
};

/// Runs every *.json scenario of `dir` (sorted by name), writing <stem>.csv and
/// <stem>.metrics.json into out_dir. Runs are independent and may execute in
/// parallel.
std::vector<BatchEntry> run_batch(const std::filesystem::path& dir,
                                  const std::filesystem::path& out_dir, unsigned jobs = 1);

}  // namespace vtol
