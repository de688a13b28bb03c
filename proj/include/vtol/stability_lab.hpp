#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vtol/attitude_rate.hpp"
#include "vtol/geom3.hpp"

namespace vtol::lab {

/// E = (1 - i.i_bar) + (1 - j.j_bar) + (1 - k.k_bar), evaluated as
/// 0.5 |R - R_bar|_F^2, which equals trace(I - R R_bar^T) without the
/// cancellation of the trace form near zero.
double lyap_E(const Rotation& R, const Rotation& frame);
/// Three-term sum over the axes.
double lyap_E_axes(const Rotation& R, const Rotation& frame);
/// trace(I - R R_bar^T).
double lyap_E_trace(const Rotation& R, const Rotation& frame);

/// |a^T Pa(Rt) Pa(Rt) a + 0.5 a^T (I - Rt Rt) a|, zero for every rotation Rt.
double identity_check(const Mat3& Rt, const Vec3& a);

/// Q = k_k P(k_bar) + k_j P(j_bar) (+ k_i P(i_bar)).
Mat3 q_matrix(double k_k, double k_j, const Vec3& k_bar, const Vec3& j_bar, double k_i = 0.0,
              const Vec3& i_bar = Vec3::UnitX());

/// Smallest eigenvalue of k_k P(k_bar) + k_j P(j_bar) in closed form. The axes
/// need not be orthogonal.
double q_rate_bound(double k_k, double k_j, const Vec3& k_bar, const Vec3& j_bar);

/// Decay rate of E along the kinematic closed loop, -2 vex(Pa(Rt))^T Q vex(Pa(Rt)),
/// with Rt = R R_bar^T.
double lyap_rate(const Rotation& R, const Rotation& frame, const Mat3& Q);

enum class RateLaw { LowSpeed, FullFrame };

struct KinematicTrial {
  Rotation R0;
  Rotation frame0;
  /// Constant inertial angular velocity of the desired frame.
  Vec3 frame_rate = Vec3::Zero();
  RateGains gains;
  RateLaw law = RateLaw::LowSpeed;
  /// |v_a|; the air velocity is aligned with the desired i axis.
  double airspeed = 5.0;
  double eps = 0.1;
  double dt = 0.005;
  double horizon = 3.0;

  void validate() const;
  Rotation frame_at(double t) const;
  /// Lateral target j_d of the low-speed law for this trial.
  Vec3 lateral_target(const Rotation& frame) const;
  /// Q of the trial's law at the initial frame.
  Mat3 q() const;
};

/// Inertial desired angular velocity of the trial's law.
Vec3 trial_omega_star(const KinematicTrial& trial, const Mat3& R, double t);

struct KinematicTrace {
  std::vector<double> t;
  std::vector<double> E;
  std::vector<double> k_misalignment;  // 1 - k.k_bar
  double fitted_rate = 0.0;  // least-squares rate of log E over the tail half
  double lambda_min_q = 0.0;
  bool diverged = false;
  std::string failure;
};

/// Integrates R' = (w*)x R (RK4 with attitude repair) and samples E.
KinematicTrace simulate_kinematic(const KinematicTrial& trial);

/// Closed-form 1 - k.k_bar for the k-axis loop with fixed k_bar, from the
/// logistic solution of d/dt s = -2 k_k (1 - s) s, s = sin^2(theta/2).
double k_axis_closed_form(double misalignment0, double k_k, double t);

/// Haar-uniform rotation from a normalized Gaussian quaternion.
Rotation random_rotation(std::mt19937_64& rng);

struct Prop1Options {
  double airspeed = 5.0;
  double antipodal_exclusion = 1e-3;  // rad
  double rate_factor = 0.5;
  double ode_tolerance = 1e-4;
  double convergence_floor = 1e-6;
  RateGains gains;
  double dt = 0.005;
  double horizon_full = 3.0;
  double horizon_k = 5.0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct TrialOutcome {
  bool excluded = false;
  bool passed = false;
  double rate_ratio = 0.0;  // fitted rate / lambda_min(Q)
  double ode_error = 0.0;
  std::string reason;
  Eigen::Vector4d q0 = Eigen::Vector4d::Zero();
  Eigen::Vector4d frame_q = Eigen::Vector4d::Zero();
};

struct RegimeSummary {
  int passed = 0;
  int failed = 0;
  int excluded = 0;
  double min_rate_ratio = 0.0;
  double mean_rate_ratio = 0.0;
  double max_ode_error = 0.0;
};

struct Prop1Report {
  int trials = 0;
  std::uint64_t seed = 0;
  RegimeSummary full_frame;
  RegimeSummary k_axis;
  std::vector<nlohmann::json> counterexamples;

  bool all_passed() const {
    return full_frame.failed == 0 && k_axis.failed == 0;
  }
};

/// Full-frame trial (airspeed >= sigma): monotone decrease of E and tail rate
/// >= rate_factor * lambda_min(Q).
TrialOutcome run_full_frame_trial(const KinematicTrial& trial, const Prop1Options& opt);
/// k-axis trial (zero airspeed): agreement with the closed-form solution and
/// convergence of k to k_bar.
TrialOutcome run_k_axis_trial(const KinematicTrial& trial, const Prop1Options& opt);

/// Deterministic per seed; trials run in parallel with per-trial seeding.
Prop1Report prop1_montecarlo(int trials, std::uint64_t seed, const Prop1Options& opt = {});

nlohmann::json to_json(const Prop1Report& r);

}  // namespace vtol::lab
