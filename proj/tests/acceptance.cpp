// Acceptance checks, one line per criterion. Exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "vtol/allocation.hpp"
#include "vtol/blend.hpp"
#include "vtol/desired_frame.hpp"
#include "vtol/errors.hpp"
#include "vtol/simulation.hpp"
#include "vtol/stability_lab.hpp"

namespace {

using namespace vtol;
using testing::Gen;

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / kPi;

// 1. Hover
constexpr double kHoverThrustRel = 0.01;
constexpr double kHoverTilt = 0.01;
constexpr double kHoverPosition = 0.1;
constexpr double kHoverSettle = 10.0;
constexpr double kHoverRuntime = 5.0;
// 2. Mission
constexpr double kTakeoffTiltDeg = 10.0;
constexpr double kTopTiltLowDeg = 80.0;
constexpr double kTopTiltHighDeg = 90.0;
constexpr double kSpeedRms = 0.5;
constexpr double kCrossTrackRms = 2.0;
constexpr double kMissionRuntime = 60.0;
// 3. Kinematic attitude loop
constexpr int kProp1Trials = 1000;
constexpr std::uint64_t kProp1Seed = 7;
constexpr double kProp1Runtime = 30.0;
// 4. Identities
constexpr int kIdentitySamples = 10000;
constexpr double kIdentityTol = 1e-11;
constexpr double kIdentityRuntime = 2.0;
// 5. Thrust minimality
constexpr int kMinimalitySamples = 10000;
constexpr double kGridStep = 0.001;
constexpr double kMinimalitySlack = 1e-9;
constexpr double kMinimalityRuntime = 20.0;
// 6. Allocation
constexpr int kAllocSamples = 100000;
constexpr double kAllocRelTol = 1e-9;
constexpr double kAllocRuntime = 5.0;
// 7. Estimator
constexpr double kEstimatorTol = 0.5;
constexpr double kEstimatorSettle = 5.0;
constexpr double kEstimatorRuntime = 10.0;
// 8. Transition
constexpr double kSweepTop = 12.0;
constexpr double kSweepRate = 250.0;
constexpr double kAlphaStep = 0.01;

int failures = 0;

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void hover() {
  const Clock clock;
  const Scenario s = Scenario::hover();
  const RunResult r = run(s);
  const double secs = clock.seconds();
  const double weight = s.aircraft.mass * s.aircraft.g0;
  double worst = 0.0;
  for (const LogRecord& rec : r.log) {
    if (rec.t >= kHoverSettle) worst = std::max(worst, rec.cross_track);
  }
  const bool ok = r.metrics.success &&
                  std::abs(r.metrics.final_thrust - weight) <= kHoverThrustRel * weight &&
                  std::abs(r.metrics.final_tilt) <= kHoverTilt && worst < kHoverPosition &&
                  secs < kHoverRuntime;
  report(1, "hover equilibrium", ok,
         fmt("T=%.4f N (mg=%.4f, tol 1%%), tilt=%.2e rad (tol %.2f), max position error after "
             "%.0f s=%.2e m (tol %.1f), runtime %.2f s (limit %.0f)",
             r.metrics.final_thrust, weight, r.metrics.final_tilt, kHoverTilt, kHoverSettle, worst,
             kHoverPosition, secs, kHoverRuntime));
}

void mission() {
  const Clock clock;
  const RunResult r = run(Scenario::circle_mission());
  const double secs = clock.seconds();
  const Metrics& m = r.metrics;
  const bool tilt_ok = m.takeoff_median_tilt_deg <= kTakeoffTiltDeg &&
                       m.max_thrust_tilt_deg >= kTopTiltLowDeg &&
                       m.max_thrust_tilt_deg <= kTopTiltHighDeg;
  const bool ok = m.success && tilt_ok && m.speed_rms_outside_gusts < kSpeedRms &&
                  m.path_capture_time >= 0.0 && m.cross_track_rms < kCrossTrackRms &&
                  secs < kMissionRuntime;
  report(2, "mission reproduction", ok,
         fmt("takeoff median tilt %.2f deg (<= %.0f), max tilt %.2f deg (in [%.0f, %.0f]), "
             "speed RMS outside gusts %.3f m/s (< %.1f), cross-track RMS %.3f m after capture at "
             "%.2f s (< %.0f), runtime %.2f s (limit %.0f)",
             m.takeoff_median_tilt_deg, kTakeoffTiltDeg, m.max_thrust_tilt_deg, kTopTiltLowDeg,
             kTopTiltHighDeg, m.speed_rms_outside_gusts, kSpeedRms, m.cross_track_rms,
             m.path_capture_time, kCrossTrackRms, secs, kMissionRuntime));
}

void prop1() {
  const Clock clock;
  const lab::Prop1Report rep = lab::prop1_montecarlo(kProp1Trials, kProp1Seed);
  const double secs = clock.seconds();
  const bool ok = rep.all_passed() && secs < kProp1Runtime;
  report(3, "kinematic attitude monte carlo", ok,
         fmt("%d trials seed %llu; full frame %d pass %d fail %d excluded, min rate/lambda_min "
             "%.3f (>= 0.5); k-axis %d pass %d fail, max ODE error %.2e (<= 1e-4); runtime %.2f s "
             "(limit %.0f)",
             rep.trials, static_cast<unsigned long long>(rep.seed), rep.full_frame.passed,
             rep.full_frame.failed, rep.full_frame.excluded, rep.full_frame.min_rate_ratio,
             rep.k_axis.passed, rep.k_axis.failed, rep.k_axis.max_ode_error, secs,
             kProp1Runtime));
}

void identities() {
  const Clock clock;
  Gen g(2024);
  double anti = 0.0, cross = 0.0, pa = 0.0;
  for (int n = 0; n < kIdentitySamples; ++n) {
    const Vec3 a = g.vec(), b = g.vec();
    anti = std::max(anti, (skew(a) * b + skew(b) * a).cwiseAbs().maxCoeff());
    const Mat3 lhs = skew(testing::cross_components(a, b));
    const Mat3 rhs = b * a.transpose() - a * b.transpose();
    cross = std::max(cross, (lhs - rhs).cwiseAbs().maxCoeff());
    pa = std::max(pa, lab::identity_check(g.rotation(), g.unit()));
  }
  const double secs = clock.seconds();
  const bool ok = anti < kIdentityTol && cross < kIdentityTol && pa < kIdentityTol &&
                  secs < kIdentityRuntime;
  report(4, "matrix identities", ok,
         fmt("%d samples: anticommutation %.1e, cross-of-cross %.1e, projector identity %.1e "
             "(tol %.0e), runtime %.2f s (limit %.0f)",
             kIdentitySamples, anti, cross, pa, kIdentityTol, secs, kIdentityRuntime));
}

void minimality() {
  const Clock clock;
  const AircraftParams p;
  const testing::ThrustOracle oracle{p.mass, p.g0, p.c0, p.c0_bar};
  Gen g(99);
  double worst = -1e300;
  int violations = 0, drawn = 0;
  while (drawn < kMinimalitySamples) {
    const Vec3 xi = g.vec(4.0), v_a = g.vec(15.0);
    const Vec3 a = p.mass * (xi - p.g0 * Vec3::UnitZ());
    if (v_a.norm() < 0.5 || v_a.cross(a).norm() < 1e-2 * v_a.norm() * a.norm()) continue;
    ++drawn;
    const double t_star = oracle.thrust(xi, v_a, alpha_min_thrust(a, v_a, p));
    for (double x = -kPi / 2; x <= kPi / 2; x += kGridStep) {
      const double gap = t_star - oracle.thrust(xi, v_a, x);
      worst = std::max(worst, gap);
      if (gap > kMinimalitySlack) ++violations;
    }
  }
  const double secs = clock.seconds();
  const bool ok = violations == 0 && secs < kMinimalityRuntime;
  report(5, "thrust minimality", ok,
         fmt("%d samples, grid step %.3f rad: %d violations, max T* - T_grid %.2e N (slack "
             "%.0e), runtime %.2f s (limit %.0f)",
             kMinimalitySamples, kGridStep, violations, worst, kMinimalitySlack, secs,
             kMinimalityRuntime));
}

void allocation_round_trip() {
  const Clock clock;
  const AircraftParams p;
  const testing::MixerOracle mixer{p.mu12, p.mu3, p.r1, p.r2, p.r3, p.nu12, p.nu3};
  Gen g(6);
  int checked = 0;
  double worst = 0.0;
  while (checked < kAllocSamples) {
    const double thrust = g.uniform(2.0, 20.0), tilt = g.uniform(-0.1, 1.5);
    const Vec3 gm = g.vec(0.05);
    ActuatorSet a;
    try {
      a = rotor_solve(thrust, tilt, gm, p);
    } catch (const AllocationInfeasible&) {
      continue;
    }
    if (a.saturated.any()) continue;
    Eigen::Matrix<double, 5, 1> rhs;
    rhs << thrust * std::sin(tilt), thrust * std::cos(tilt), gm;
    worst = std::max(worst, (mixer.wrench(a.w, a.tilt) - rhs).norm() / rhs.norm());
    ++checked;
  }
  bool flags_ok = true;
  bool flag = false;
  constexpr double lo = AircraftParams::kTiltMin, hi = AircraftParams::kTiltMax;
  flags_ok &= lo == -kPi / 15 && hi == kPi / 2;
  flags_ok &= clamp_flagged(lo, lo, hi, flag) == lo && !flag;
  flags_ok &= clamp_flagged(hi, lo, hi, flag) == hi && !flag;
  flags_ok &= clamp_flagged(std::nextafter(lo, -1.0), lo, hi, flag) == lo && flag;
  flags_ok &= clamp_flagged(std::nextafter(hi, 2.0), lo, hi, flag) == hi && flag;
  const double secs = clock.seconds();
  const bool ok = worst < kAllocRelTol && flags_ok && secs < kAllocRuntime;
  report(6, "allocation round trip", ok,
         fmt("%d feasible samples: max relative error %.2e (tol %.0e); tilt flags exact at "
             "[-pi/15, pi/2]: %s; runtime %.2f s (limit %.0f)",
             kAllocSamples, worst, kAllocRelTol, flags_ok ? "yes" : "no", secs, kAllocRuntime));
}

double estimator_error_after(const RunResult& r, double t0) {
  double worst = 0.0;
  for (const LogRecord& rec : r.log) {
    if (rec.t >= t0) worst = std::max(worst, (rec.v_a_hat - rec.v_a_true).cwiseAbs().maxCoeff());
  }
  return worst;
}

void estimator() {
  const Clock clock;
  const RunResult head = run(Scenario::cruise());
  Scenario cross = Scenario::cruise();
  cross.wind.steady = Vec3(0.0, 3.0, 0.0);
  const RunResult side = run(cross);
  const RunResult hov = run(Scenario::hover());
  const double secs = clock.seconds();
  const double e_head = estimator_error_after(head, kEstimatorSettle);
  const double e_side = estimator_error_after(side, kEstimatorSettle);
  std::size_t null_cycles = 0;
  for (const LogRecord& rec : hov.log) null_cycles += !rec.pitot_valid;
  const std::size_t violations = head.metrics.null_estimate_violations +
                                 side.metrics.null_estimate_violations +
                                 hov.metrics.null_estimate_violations;
  const bool ok = head.metrics.success && side.metrics.success && e_head < kEstimatorTol &&
                  e_side < kEstimatorTol && null_cycles > 0 && violations == 0 &&
                  secs < kEstimatorRuntime;
  report(7, "estimator consistency", ok,
         fmt("max per-axis error after %.0f s: headwind %.2e, crosswind %.2e m/s (tol %.1f); "
             "%zu below-threshold cycles, %zu non-null estimates; runtime %.2f s (limit %.0f)",
             kEstimatorSettle, e_head, e_side, kEstimatorTol, null_cycles, violations, secs,
             kEstimatorRuntime));
}

void transition() {
  const Scenario s = Scenario::circle_mission();
  const FrameConfig& fc = s.controller.frame;
  const TorqueSplitConfig& sc = s.controller.split;
  FrameSelector sel(fc, s.aircraft);
  const double dt = 1.0 / kSweepRate;
  const SpeedRamp& ramp = s.mission.ramp;
  const int cycles = static_cast<int>(kSweepTop / ramp.ramp_rate * kSweepRate);
  double prev = 0.0, max_step = 0.0;
  for (int n = 0; n <= cycles; ++n) {
    const double speed = ramp.ramp_rate * n * dt;
    const auto out = sel.select(Vec3(0.1, 0, 0), Vec3(speed, 0, 0), Rotation::identity(), dt);
    if (n) max_step = std::max(max_step, std::abs(out.frame.alpha - prev));
    prev = out.frame.alpha;
  }
  const double lo = fc.sigma_m, hi = fc.sigma_M;
  const double d0 = sc.delta_star, d1 = sc.delta_star + sc.width;
  const bool exact = blend_alpha(lo, 0.1, 0.5, lo, hi).lambda_val == 1.0 &&
                     blend_alpha(hi, 0.1, 0.5, lo, hi).lambda_val == 0.0 &&
                     split_torque(Vec3::Ones(), d0, d0, sc.width).lambda_bar == 1.0 &&
                     split_torque(Vec3::Ones(), d1, d0, sc.width).lambda_bar == 0.0 &&
                     smooth_step_down_slope(lo, lo, hi) == 0.0 &&
                     smooth_step_down_slope(hi, lo, hi) == 0.0 &&
                     smooth_step_down_slope(d0, d0, d1) == 0.0 &&
                     smooth_step_down_slope(d1, d0, d1) == 0.0;
  // Slope continuity: one-sided difference quotients agree across the range.
  const double h = 1e-6;
  double slope_jump = 0.0;
  for (double x = 0.0; x <= kSweepTop; x += 1e-3) {
    for (auto [a, b] : {std::pair{lo, hi}, std::pair{d0, d1}}) {
      const double left = (smooth_step_down(x, a, b) - smooth_step_down(x - h, a, b)) / h;
      const double right = (smooth_step_down(x + h, a, b) - smooth_step_down(x, a, b)) / h;
      slope_jump = std::max(slope_jump, std::abs(left - right));
    }
  }
  const bool ok = max_step < kAlphaStep && exact && slope_jump < 1e-4;
  report(8, "transition continuity", ok,
         fmt("0-%.0f m/s sweep at %.0f Hz: max alpha step %.2e rad (< %.2f); boundary values "
             "exact at %.0f, %.0f, %.0f, %.0f m/s: %s; max one-sided slope gap %.1e",
             kSweepTop, kSweepRate, max_step, kAlphaStep, lo, hi, d0, d1, exact ? "yes" : "no",
             slope_jump));
}

void determinism() {
  Scenario s = Scenario::circle_mission();
  s.sim.pitot_noise = 0.1;
  s.sim.disturbance_torque = 0.005;
  s.sim.seed = 17;
  std::ostringstream a, b;
  write_csv(a, run(s).log);
  write_csv(b, run(s).log);
  const bool ok = a.str() == b.str();
  report(9, "determinism", ok,
         fmt("two noisy %.0f s mission runs with seed %llu: %zu-byte logs %s", s.sim.duration,
             static_cast<unsigned long long>(s.sim.seed), a.str().size(),
             ok ? "identical" : "differ"));
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)()> checks[] = {
      {"hover", hover},       {"mission", mission},         {"prop1", prop1},
      {"identities", identities}, {"minimality", minimality}, {"allocation", allocation_round_trip},
      {"estimator", estimator},   {"transition", transition}, {"determinism", determinism}};
  int id = 0;
  for (const auto& [name, fn] : checks) {
    ++id;
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %d criteria passed\n", id - failures, id);
  return failures == 0 ? 0 : 1;
}
