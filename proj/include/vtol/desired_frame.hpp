#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vtol/airframe.hpp"
#include "vtol/geom3.hpp"

namespace vtol {

enum class FlightRegime { LowSpeed = 0, Transition = 1, HighSpeed = 2 };

std::string to_string(FlightRegime r);

/// a = m (xi - g), d = a + c0 |v_a| v_a, e = a + c0_bar |v_a| v_a
/// (inertial coordinates, newtons).
struct AccelTriple {
  Vec3 a = Vec3::Zero();
  Vec3 d = Vec3::Zero();
  Vec3 e = Vec3::Zero();
};

/// Target body axes in inertial coordinates.
struct DesiredFrame {
  Vec3 i_bar = Vec3::UnitX();
  Vec3 j_bar = Vec3::UnitY();
  Vec3 k_bar = Vec3::UnitZ();
  /// Unnormalized lateral target of the low-speed construction (zero at
  /// vanishing airspeed).
  Vec3 j_d = Vec3::Zero();
  /// Desired longitudinal axis of the low-speed construction.
  Vec3 i_d = Vec3::UnitX();
  double alpha = 0.0;
  double theta_d = 0.0;
  double lambda_val = 1.0;
  FlightRegime regime = FlightRegime::LowSpeed;
  /// False when only k_bar and j_d are meaningful (low airspeed); i_bar and
  /// j_bar then complete k_bar with i_d into a right-handed triad.
  bool complete = false;

  Rotation rotation() const;
};

struct TiltThrust {
  double tilt = 0.0;    // rad
  double thrust = 0.0;  // N, >= 0
};

enum class SecondaryPolicy { MinThrust, TiltSchedule };

struct FrameConfig {
  double sigma_m = 3.0;   // start of the transition band, m/s
  double sigma_M = 9.0;   // end of the transition band, m/s
  /// Airspeed above which the low-speed construction yields a full frame.
  /// Also the lower bound on |v_a| under which the full-frame stability claim
  /// holds for the low-speed law.
  double sigma = 1.0;
  double eps = 0.1;               // regularizer of j_d, m/s
  double theta_d = 0.0;           // desired low-speed pitch, rad
  double i_d_time_constant = 0.25;  // s
  double regime_hysteresis = 0.25;  // m/s around sigma_m
  double eps_cross_rel = 1e-3;      // relative singularity guard for v_a x a
  SecondaryPolicy policy = SecondaryPolicy::MinThrust;
  /// (airspeed m/s, tilt rad) breakpoints, strictly increasing airspeed.
  std::vector<std::pair<double, double>> tilt_schedule;

  void validate() const;
  /// Linear interpolation of tilt_schedule, clamped at both ends.
  double scheduled_tilt(double airspeed) const;
};

AccelTriple accel_triple(const Vec3& xi, const Vec3& v_a, const AircraftParams& params);

/// (v_a x a) / |v_a x a|. Throws SingularConfiguration when
/// |v_a x a| <= eps_rel |v_a| |a|.
Vec3 jbar_highspeed(const Vec3& a, const Vec3& v_a, double eps_rel = 1e-3);

/// Angle of attack minimizing the thrust intensity:
///   0.5 atan2(|v_a x a|, a.v_a + 0.5 (c0 + c0_bar) |v_a|^3).
double alpha_min_thrust(const Vec3& a, const Vec3& v_a, const AircraftParams& params);

/// Angle of attack realizing a prescribed thrust tilt, on the branch where the
/// resulting thrust is nonnegative.
double alpha_from_tilt(double tilt, const Vec3& a, const Vec3& v_a, const AircraftParams& params);

/// Full frame from the air velocity, the acceleration demand and the angle of
/// attack: i = cos(alpha) v^ + sin(alpha) (j x v^), k = i x j.
DesiredFrame frame_highspeed(const Vec3& a, const Vec3& v_a, double alpha,
                             double eps_rel = 1e-3);

/// Desired longitudinal axis from a pitch target and the current heading.
/// Throws SingularConfiguration when the current i axis is vertical.
Vec3 desired_pitch_axis(double theta_d, const Vec3& i_current);

/// Low-speed construction from an (optionally filtered) longitudinal axis i_d:
///   k = -P(i_d)a / |P(i_d)a|,  j_d = (k x v_a) / (eps + |k x v_a|),
/// completed to a full frame when |v_a| >= sigma.
DesiredFrame frame_lowspeed_from_axis(const Vec3& i_d, const Vec3& a, const Vec3& v_a, double eps,
                                      double sigma);

DesiredFrame frame_lowspeed(double theta_d, const Vec3& i_current, const Vec3& a,
                            const Vec3& v_a, double eps, double sigma);

struct BlendedAlpha {
  double alpha = 0.0;
  double lambda_val = 1.0;
};

BlendedAlpha blend_alpha(double speed, double alpha_l, double alpha_h, double sigma_m,
                         double sigma_M);

/// tilt = atan2(d.i, -e.k), thrust = sin(tilt) d.i - cos(tilt) e.k >= 0.
TiltThrust tilt_thrust(const Vec3& d, const Vec3& e, const Vec3& i_star, const Vec3& k_bar);

/// Stateful per-cycle frame selection: regime hysteresis, i_d filtering,
/// secondary-objective blend and thrust extraction.
class FrameSelector {
 public:
  FrameSelector(FrameConfig config, AircraftParams params);

  struct Selection {
    DesiredFrame frame;
    TiltThrust command;
    AccelTriple accel;
    double alpha_l = 0.0;
    double alpha_h = 0.0;
    bool fallback = false;  // high-speed construction singular this cycle
  };

  /// `v_a` is the inertial air-velocity estimate.
  Selection select(const Vec3& xi, const Vec3& v_a, const Rotation& R, double dt);

  FlightRegime regime() const { return regime_; }
  const FrameConfig& config() const { return config_; }

 private:
  FlightRegime classify(double speed);

  FrameConfig config_;
  AircraftParams params_;
  FlightRegime regime_ = FlightRegime::LowSpeed;
  Vec3 i_d_filtered_ = Vec3::UnitX();
  bool initialized_ = false;
};

}  // namespace vtol
