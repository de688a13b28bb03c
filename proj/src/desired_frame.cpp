#include "vtol/desired_frame.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vtol/blend.hpp"
#include "vtol/errors.hpp"

namespace vtol {

namespace {

const Vec3 kDown = Vec3::UnitZ();

Vec3 unit_or_throw(const Vec3& x, double floor, const char* what) {
  const double n = x.norm();
  if (!(n > floor)) {
    throw SingularConfiguration(what);
  }
  return x / n;
}

}  // namespace

std::string to_string(FlightRegime r) {
  switch (r) {
    case FlightRegime::LowSpeed:
      return "low_speed";
    case FlightRegime::Transition:
      return "transition";
    case FlightRegime::HighSpeed:
      return "high_speed";
  }
  return "unknown";
}

Rotation DesiredFrame::rotation() const {
  Mat3 m;
  m.col(0) = i_bar;
  m.col(1) = j_bar;
  m.col(2) = k_bar;
  return Rotation::unchecked(m);
}

void FrameConfig::validate() const {
  if (!(sigma_m > 0.0 && sigma_M > sigma_m)) {
    throw ConfigError("frame: require 0 < sigma_m < sigma_M");
  }
  if (!(sigma > 0.0 && eps > 0.0 && i_d_time_constant > 0.0 && eps_cross_rel > 0.0)) {
    throw ConfigError("frame: sigma, eps, i_d_time_constant and eps_cross_rel must be > 0");
  }
  if (!(regime_hysteresis >= 0.0 && regime_hysteresis < sigma_m)) {
    throw ConfigError("frame: regime_hysteresis must lie in [0, sigma_m)");
  }
  if (policy == SecondaryPolicy::TiltSchedule && tilt_schedule.empty()) {
    throw ConfigError("frame: tilt_schedule policy needs at least one breakpoint");
  }
  for (std::size_t n = 1; n < tilt_schedule.size(); ++n) {
    if (!(tilt_schedule[n].first > tilt_schedule[n - 1].first)) {
      throw ConfigError("frame: tilt_schedule airspeeds must be strictly increasing");
    }
  }
}

double FrameConfig::scheduled_tilt(double airspeed) const {
  if (tilt_schedule.empty()) {
    return 0.0;
  }
  if (airspeed <= tilt_schedule.front().first) return tilt_schedule.front().second;
  if (airspeed >= tilt_schedule.back().first) return tilt_schedule.back().second;
  auto hi = std::upper_bound(tilt_schedule.begin(), tilt_schedule.end(), airspeed,
                             [](double x, const auto& bp) { return x < bp.first; });
  auto lo = hi - 1;
  const double s = (airspeed - lo->first) / (hi->first - lo->first);
  return lo->second + s * (hi->second - lo->second);
}

AccelTriple accel_triple(const Vec3& xi, const Vec3& v_a, const AircraftParams& params) {
  AccelTriple t;
  const Vec3 scaled = v_a.norm() * v_a;
  t.a = params.mass * (xi - params.g0 * kDown);
  t.d = t.a + params.c0 * scaled;
  t.e = t.a + params.c0_bar * scaled;
  return t;
}

Vec3 jbar_highspeed(const Vec3& a, const Vec3& v_a, double eps_rel) {
  const Vec3 c = v_a.cross(a);
  const double guard = eps_rel * v_a.norm() * a.norm();
  const double n = c.norm();
  if (!(n > guard) || n == 0.0) {
    throw SingularConfiguration("lateral axis undefined: air velocity aligned with acceleration");
  }
  return c / n;
}

double alpha_min_thrust(const Vec3& a, const Vec3& v_a, const AircraftParams& params) {
  const double speed = v_a.norm();
  if (!(speed > 0.0)) {
    throw ContractViolation("alpha_min_thrust needs a nonzero air velocity");
  }
  const double cross = v_a.cross(a).norm();
  const double along = a.dot(v_a) + 0.5 * (params.c0 + params.c0_bar) * speed * speed * speed;
  return 0.5 * std::atan2(cross, along);
}

double alpha_from_tilt(double tilt, const Vec3& a, const Vec3& v_a, const AircraftParams& params) {
  const double speed = v_a.norm();
  if (!(speed > 0.0)) {
    throw ContractViolation("alpha_from_tilt needs a nonzero air velocity");
  }
  const double cross = v_a.cross(a).norm();
  const double av = a.dot(v_a);
  const double cube = speed * speed * speed;
  const double s = std::sin(tilt);
  const double c = std::cos(tilt);
  const double num = s * cross - c * (av + params.c0 * cube);
  const double den = c * cross + s * (av + params.c0_bar * cube);
  if (std::abs(num) < 1e-12 && std::abs(den) < 1e-12) {
    throw SingularConfiguration("angle of attack indeterminate for the requested tilt");
  }
  double alpha = std::atan2(num, den);
  // The tangent fixes alpha modulo pi; keep the branch with nonnegative thrust.
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double thrust_scaled = s * (ca * (av + params.c0 * cube) + sa * cross) -
                               c * (sa * (av + params.c0_bar * cube) - ca * cross);
  if (thrust_scaled < 0.0) alpha += alpha > 0.0 ? -std::numbers::pi : std::numbers::pi;
  return alpha;
}

DesiredFrame frame_highspeed(const Vec3& a, const Vec3& v_a, double alpha, double eps_rel) {
  const Vec3 j = jbar_highspeed(a, v_a, eps_rel);
  const Vec3 vh = v_a.normalized();
  const Vec3 w = j.cross(vh);
  DesiredFrame f;
  f.j_bar = j;
  f.i_bar = std::cos(alpha) * vh + std::sin(alpha) * w;
  f.k_bar = std::sin(alpha) * vh - std::cos(alpha) * w;
  f.j_d = j;
  f.i_d = f.i_bar;
  f.alpha = alpha;
  f.lambda_val = 0.0;
  f.regime = FlightRegime::HighSpeed;
  f.complete = true;
  return f;
}

Vec3 desired_pitch_axis(double theta_d, const Vec3& i_current) {
  const Vec3 horizontal = project_perp(kDown, i_current);
  const Vec3 heading = unit_or_throw(horizontal, 1e-6, "heading undefined: body i axis vertical");
  return std::cos(theta_d) * heading - std::sin(theta_d) * kDown;
}

DesiredFrame frame_lowspeed_from_axis(const Vec3& i_d, const Vec3& a, const Vec3& v_a, double eps,
                                      double sigma) {
  DesiredFrame f;
  f.i_d = i_d.normalized();
  f.k_bar = -unit_or_throw(project_perp(f.i_d, a), 1e-6,
                           "low-speed frame undefined: acceleration along desired i axis");
  const Vec3 kv = f.k_bar.cross(v_a);
  const double kv_norm = kv.norm();
  f.j_d = kv / (eps + kv_norm);
  f.regime = FlightRegime::LowSpeed;
  f.lambda_val = 1.0;

  const double speed = v_a.norm();
  if (speed >= sigma && kv_norm > 1e-9) {
    f.j_bar = f.j_d.normalized();
    // j x k keeps the triad right-handed.
    f.i_bar = f.j_bar.cross(f.k_bar).normalized();
    f.alpha = std::asin(std::clamp(v_a.dot(f.k_bar) / speed, -1.0, 1.0));
    f.complete = true;
  } else {
    f.i_bar = project_perp(f.k_bar, f.i_d).normalized();
    f.j_bar = f.k_bar.cross(f.i_bar);
    f.alpha = 0.0;
    f.complete = false;
  }
  return f;
}

DesiredFrame frame_lowspeed(double theta_d, const Vec3& i_current, const Vec3& a,
                            const Vec3& v_a, double eps, double sigma) {
  DesiredFrame f =
      frame_lowspeed_from_axis(desired_pitch_axis(theta_d, i_current), a, v_a, eps, sigma);
  f.theta_d = theta_d;
  return f;
}

BlendedAlpha blend_alpha(double speed, double alpha_l, double alpha_h, double sigma_m,
                         double sigma_M) {
  if (!(sigma_m > 0.0 && sigma_m < sigma_M)) {
    throw ContractViolation("blend_alpha requires 0 < sigma_m < sigma_M");
  }
  BlendedAlpha out;
  out.lambda_val = smooth_step_down(speed, sigma_m, sigma_M);
  out.alpha = out.lambda_val * alpha_l + (1.0 - out.lambda_val) * alpha_h;
  return out;
}

TiltThrust tilt_thrust(const Vec3& d, const Vec3& e, const Vec3& i_star, const Vec3& k_bar) {
  const double forward = d.dot(i_star);
  const double normal = e.dot(k_bar);
  if (forward == 0.0 && normal == 0.0) {
    throw SingularConfiguration("thrust tilt indeterminate: zero demand in the thrust plane");
  }
  TiltThrust out;
  out.tilt = std::atan2(forward, -normal);
  out.thrust = std::sin(out.tilt) * forward - std::cos(out.tilt) * normal;
  return out;
}

FrameSelector::FrameSelector(FrameConfig config, AircraftParams params)
    : config_(std::move(config)), params_(params) {
  config_.validate();
  params_.validate();
}

FlightRegime FrameSelector::classify(double speed) {
  const double h = config_.regime_hysteresis;
  if (regime_ == FlightRegime::LowSpeed) {
    if (speed > config_.sigma_m + h) {
      regime_ = FlightRegime::Transition;
    }
  } else if (speed < config_.sigma_m - h) {
    regime_ = FlightRegime::LowSpeed;
  }
  if (regime_ != FlightRegime::LowSpeed) {
    regime_ = speed >= config_.sigma_M ? FlightRegime::HighSpeed : FlightRegime::Transition;
  }
  return regime_;
}

FrameSelector::Selection FrameSelector::select(const Vec3& xi, const Vec3& v_a,
                                               const Rotation& R, double dt) {
  Selection out;
  out.accel = accel_triple(xi, v_a, params_);
  const AccelTriple& acc = out.accel;

  const Vec3 raw_axis = desired_pitch_axis(config_.theta_d, R.i());
  if (!initialized_) {
    i_d_filtered_ = raw_axis;
    initialized_ = true;
  } else {
    const double gain = std::clamp(dt / config_.i_d_time_constant, 0.0, 1.0);
    i_d_filtered_ += gain * (raw_axis - i_d_filtered_);
    i_d_filtered_.normalize();
  }

  const double speed = v_a.norm();
  const FlightRegime regime = classify(speed);

  DesiredFrame low =
      frame_lowspeed_from_axis(i_d_filtered_, acc.a, v_a, config_.eps, config_.sigma);
  low.theta_d = config_.theta_d;

  auto use_low = [&]() {
    out.frame = low;
    out.frame.regime = FlightRegime::LowSpeed;
    out.frame.lambda_val = 1.0;
    out.command = tilt_thrust(acc.d, acc.e, low.i_d, low.k_bar);
  };

  if (regime == FlightRegime::LowSpeed) {
    use_low();
    out.alpha_l = low.alpha;
    out.alpha_h = low.alpha;
    return out;
  }

  out.alpha_l = low.alpha;
  try {
    out.alpha_h = config_.policy == SecondaryPolicy::MinThrust
                      ? alpha_min_thrust(acc.a, v_a, params_)
                      : alpha_from_tilt(config_.scheduled_tilt(speed), acc.a, v_a, params_);
    const BlendedAlpha blend =
        blend_alpha(speed, out.alpha_l, out.alpha_h, config_.sigma_m, config_.sigma_M);
    out.frame = frame_highspeed(acc.a, v_a, blend.alpha, config_.eps_cross_rel);
    out.frame.lambda_val = blend.lambda_val;
    out.frame.regime = regime;
    out.frame.theta_d = config_.theta_d;
    out.frame.i_d = low.i_d;
    out.command = tilt_thrust(acc.d, acc.e, out.frame.i_bar, out.frame.k_bar);
  } catch (const SingularConfiguration&) {
    use_low();
    out.fallback = true;
  }
  return out;
}

}  // namespace vtol
