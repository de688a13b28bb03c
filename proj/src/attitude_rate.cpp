#include "vtol/attitude_rate.hpp"

#include <algorithm>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

// Lateral axis used to carry the roll-about-k part of the frame rate.
std::optional<Vec3> low_speed_lateral(const DesiredFrame& f) {
  const double n = f.j_d.norm();
  if (n < 1e-6) {
    return std::nullopt;
  }
  return f.j_d / n;
}

Vec3 compose(const DesiredFrame& now, const Vec3& i_dot, const Vec3& j_dot, const Vec3& k_dot) {
  const Vec3& k = now.k_bar;
  Vec3 w = k.cross(k_dot);
  if (now.regime == FlightRegime::LowSpeed) {
    if (auto j = low_speed_lateral(now)) {
      w += k.dot(j->cross(j_dot)) * k;
    }
  } else {
    w += k.dot(now.i_bar.cross(i_dot)) * k;
  }
  return w;
}

Vec3 lateral_axis(const DesiredFrame& f) {
  if (f.regime == FlightRegime::LowSpeed) {
    return low_speed_lateral(f).value_or(Vec3::Zero());
  }
  return f.j_bar;
}

}  // namespace

void RateGains::validate() const {
  for (double g : {k_i, k_j, k_k, k_gamma.x(), k_gamma.y(), k_gamma.z()}) {
    if (!(g > kMinRateGain)) {
      throw ConfigError("rate gains must exceed 0.05");
    }
  }
}

FrameRate frame_rate(const DesiredFrame& prev, const DesiredFrame& now, double dt) {
  if (!(dt > 0.0)) {
    throw ContractViolation("frame_rate requires dt > 0");
  }
  FrameRate out;
  if (prev.regime != now.regime) {
    return out;
  }
  const Vec3 i_dot = (now.i_bar - prev.i_bar) / dt;
  const Vec3 j_dot = (lateral_axis(now) - lateral_axis(prev)) / dt;
  const Vec3 k_dot = (now.k_bar - prev.k_bar) / dt;
  out.omega_bar = compose(now, i_dot, j_dot, k_dot);
  out.valid = true;
  return out;
}

void FrameRateEstimator::reset() {
  prev_.reset();
  i_dot_.setZero();
  j_dot_.setZero();
  k_dot_.setZero();
}

FrameRate FrameRateEstimator::update(const DesiredFrame& frame, double dt) {
  if (!(dt > 0.0)) {
    throw ContractViolation("frame rate update requires dt > 0");
  }
  FrameRate out;
  if (!prev_ || prev_->regime != frame.regime) {
    i_dot_.setZero();
    j_dot_.setZero();
    k_dot_.setZero();
    prev_ = frame;
    return out;
  }
  const double gain = std::clamp(dt / tau_, 0.0, 1.0);
  const Vec3 i_raw = (frame.i_bar - prev_->i_bar) / dt;
  const Vec3 j_raw = (lateral_axis(frame) - lateral_axis(*prev_)) / dt;
  const Vec3 k_raw = (frame.k_bar - prev_->k_bar) / dt;
  i_dot_ += gain * (i_raw - i_dot_);
  j_dot_ += gain * (j_raw - j_dot_);
  k_dot_ += gain * (k_raw - k_dot_);
  prev_ = frame;
  out.omega_bar = compose(frame, i_dot_, j_dot_, k_dot_);
  out.valid = true;
  return out;
}

Vec3 omega_star_high(const DesiredFrame& frame, const Rotation& R, const FrameRate& rate,
                     const RateGains& gains) {
  Vec3 w = rate.valid ? rate.omega_bar : Vec3::Zero();
  w += gains.k_i * R.i().cross(frame.i_bar);
  w += gains.k_j * R.j().cross(frame.j_bar);
  w += gains.k_k * R.k().cross(frame.k_bar);
  return R.matrix().transpose() * w;
}

Vec3 omega_star_low(const Vec3& j_d, const Vec3& k_bar, const Rotation& R, const FrameRate& rate,
                    const RateGains& gains) {
  Vec3 w = rate.valid ? rate.omega_bar : Vec3::Zero();
  w += gains.k_j * R.j().cross(j_d);
  w += gains.k_k * R.k().cross(k_bar);
  return R.matrix().transpose() * w;
}

Vec3 torque(const Vec3& omega, const Vec3& omega_star, const Vec3& omega_star_prev, double dt,
            const AircraftParams& params, const RateGains& gains, TorqueMode mode) {
  if (!(dt > 0.0)) {
    throw ContractViolation("torque law requires dt > 0");
  }
  const Mat3& J = params.inertia;
  Vec3 gamma = -gains.k_gamma.cwiseProduct(J * (omega - omega_star));
  if (mode == TorqueMode::Full) {
    gamma += omega.cross(J * omega_star) + J * (omega_star - omega_star_prev) / dt;
  }
  return gamma;
}

TorqueController::TorqueController(RateGains gains, TorqueMode mode,
                                   double derivative_time_constant)
    : gains_(gains), mode_(mode), tau_(derivative_time_constant) {
  gains_.validate();
}

void TorqueController::reset() {
  prev_.reset();
  omega_star_dot_.setZero();
}

Vec3 TorqueController::update(const Vec3& omega, const Vec3& omega_star, double dt,
                              const AircraftParams& params) {
  if (!(dt > 0.0)) {
    throw ContractViolation("torque law requires dt > 0");
  }
  const Mat3& J = params.inertia;
  Vec3 gamma = -gains_.k_gamma.cwiseProduct(J * (omega - omega_star));
  if (mode_ == TorqueMode::Full) {
    if (prev_) {
      const double gain = std::clamp(dt / tau_, 0.0, 1.0);
      omega_star_dot_ += gain * ((omega_star - *prev_) / dt - omega_star_dot_);
    }
    gamma += omega.cross(J * omega_star) + J * omega_star_dot_;
  }
  prev_ = omega_star;
  return gamma;
}

}  // namespace vtol
