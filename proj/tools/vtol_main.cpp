#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vtol/allocation.hpp"
#include "vtol/errors.hpp"
#include "vtol/scenario.hpp"
#include "vtol/simulation.hpp"
#include "vtol/stability_lab.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw vtol::ConfigError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

int sim_run(const std::string& config, const std::string& out_csv,
            const std::optional<std::uint64_t>& seed, const std::string& metrics_path) {
  vtol::Scenario sc = vtol::load_scenario(config);
  if (seed) sc.sim.seed = *seed;
  const vtol::RunResult res = vtol::run(sc);
  std::ofstream csv(out_csv);
  if (!csv) throw vtol::ConfigError("cannot write " + out_csv);
  vtol::write_csv(csv, res.log);
  const nlohmann::json metrics = vtol::to_json(res.metrics);
  if (metrics_path.empty()) {
    std::cout << metrics.dump(2) << '\n';
  } else {
    write_json(metrics_path, metrics);
  }
  if (!res.metrics.success) {
    std::cerr << "run failed: " << res.metrics.failure_reason << '\n';
    return kExitFailure;
  }
  return 0;
}

int sim_batch(const std::string& dir, const std::string& out_dir, unsigned jobs) {
  const auto entries = vtol::run_batch(dir, out_dir.empty() ? dir : out_dir, jobs);
  int failed = 0;
  for (const auto& e : entries) {
    std::printf("%-40s %s%s%s\n", e.config.filename().string().c_str(), e.ok ? "ok" : "FAILED",
                e.ok ? "" : ": ", e.error.c_str());
    failed += !e.ok;
  }
  return failed ? kExitFailure : 0;
}

int sim_preset(const std::string& name) {
  vtol::Scenario sc;
  if (name == "hover") {
    sc = vtol::Scenario::hover();
  } else if (name == "circle_mission") {
    sc = vtol::Scenario::circle_mission();
  } else if (name == "cruise") {
    sc = vtol::Scenario::cruise();
  } else {
    throw vtol::ConfigError("unknown preset '" + name + "'");
  }
  std::cout << vtol::scenario_to_json(sc).dump(2) << '\n';
  return 0;
}

int alloc_solve(double thrust, double tilt, const std::vector<double>& torque, double airspeed,
                const std::string& params_file) {
  const vtol::AircraftParams params =
      params_file.empty() ? vtol::AircraftParams::eflite_like()
                          : vtol::load_aircraft_params(params_file);
  const vtol::Vec3 gamma(torque[0], torque[1], torque[2]);
  try {
    const auto res = vtol::allocate(thrust, tilt, gamma, airspeed, params);
    std::cout << vtol::to_json(res, params).dump(2) << '\n';
  } catch (const vtol::AllocationInfeasible& e) {
    std::cout << nlohmann::json{{"feasible", false}, {"error", e.what()}}.dump(2) << '\n';
    return kExitFailure;
  }
  return 0;
}

int verify_prop1(int trials, std::uint64_t seed, const std::string& report, unsigned threads) {
  vtol::lab::Prop1Options opt;
  opt.threads = threads;
  const auto rep = vtol::lab::prop1_montecarlo(trials, seed, opt);
  const nlohmann::json doc = vtol::lab::to_json(rep);
  if (report.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json(report, doc);
  }
  std::printf("full frame: %d passed, %d failed, %d excluded; k axis: %d passed, %d failed, %d excluded\n",
              rep.full_frame.passed, rep.full_frame.failed, rep.full_frame.excluded,
              rep.k_axis.passed, rep.k_axis.failed, rep.k_axis.excluded);
  return rep.all_passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convertible-aircraft control simulator and verification tools"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("sim", "Closed-loop scenarios");
  sim->require_subcommand(1);

  std::string config, out_csv, metrics_path;
  std::optional<std::uint64_t> seed;
  auto* run = sim->add_subcommand("run", "Run one scenario");
  run->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_csv, "CSV log output")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--metrics", metrics_path, "Metrics JSON output (stdout when omitted)");

  std::string batch_dir, batch_out;
  unsigned jobs = 1;
  auto* batch = sim->add_subcommand("batch", "Run every scenario of a directory");
  batch->add_option("--dir", batch_dir, "Directory of scenario JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  batch->add_option("--out-dir", batch_out, "Output directory (defaults to --dir)");
  batch->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string preset;
  auto* pre = sim->add_subcommand("preset", "Print a built-in scenario as JSON");
  pre->add_option("name", preset, "hover | circle_mission | cruise")->required();

  auto* alloc = app.add_subcommand("alloc", "Actuator allocation");
  alloc->require_subcommand(1);
  double thrust = 0, tilt = 0, airspeed = 0;
  std::vector<double> torque{0, 0, 0};
  std::string params_file;
  auto* solve = alloc->add_subcommand("solve", "Allocate one wrench command");
  solve->add_option("--thrust", thrust, "Thrust, N")->required();
  solve->add_option("--tilt", tilt, "Thrust tilt, rad")->required();
  solve->add_option("--torque", torque, "Body torque x,y,z, N m")->delimiter(',')->expected(3);
  solve->add_option("--airspeed", airspeed, "Airspeed, m/s")->required();
  solve->add_option("--params", params_file, "Aircraft parameter JSON")->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Numerical verification");
  verify->require_subcommand(1);
  int trials = 1000;
  std::uint64_t prop_seed = 1;
  std::string report;
  unsigned threads = 0;
  auto* prop1 = verify->add_subcommand("prop1", "Monte-Carlo check of the kinematic attitude law");
  prop1->add_option("--trials", trials, "Random initial attitudes per regime")
      ->check(CLI::PositiveNumber);
  prop1->add_option("--seed", prop_seed, "Random seed");
  prop1->add_option("--report", report, "JSON report output (stdout when omitted)");
  prop1->add_option("--threads", threads, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return sim_run(config, out_csv, seed, metrics_path);
    if (batch->parsed()) return sim_batch(batch_dir, batch_out, jobs);
    if (pre->parsed()) return sim_preset(preset);
    if (solve->parsed()) return alloc_solve(thrust, tilt, torque, airspeed, params_file);
    if (prop1->parsed()) return verify_prop1(trials, prop_seed, report, threads);
  } catch (const vtol::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const vtol::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
