#include "vtol/airvel_estimator.hpp"

#include <cmath>

#include "vtol/errors.hpp"

namespace vtol {

void AirVelEstimatorConfig::validate() const {
  if (!(lateral_gain > 0.0)) {
    throw ConfigError("estimator: lateral_gain must be > 0");
  }
  if (!(pitot_min_fall > 0.0 && pitot_min_fall <= pitot_min_rise)) {
    throw ConfigError("estimator: require 0 < pitot_min_fall <= pitot_min_rise");
  }
  if (!(g0 > 0.0)) {
    throw ConfigError("estimator: g0 must be > 0");
  }
}

double estimate_va3(const Vec3& v, const Rotation& R, double v_a1) {
  const double k0_dot_k = R.matrix()(2, 2);
  if (std::abs(k0_dot_k) <= kVerticalAttitudeGuard) {
    throw SingularConfiguration("vertical air velocity undefined: body k nearly horizontal");
  }
  return (v.z() - v_a1 * R.matrix()(2, 0)) / k0_dot_k;
}

double step_va2(double v_a2, double v_a1, double v_a3_hat, const Vec3& omega, const Rotation& R,
                double g0, double gain, double dt) {
  if (!(dt > 0.0) || !(gain > 0.0)) {
    throw ContractViolation("step_va2 requires dt > 0 and gain > 0");
  }
  const double g_j = g0 * R.matrix()(2, 1);
  const double rate = g_j + (v_a3_hat * omega.x() - v_a1 * omega.z()) - gain * v_a2;
  return v_a2 + dt * rate;
}

AirVelocityEstimator::AirVelocityEstimator(AirVelEstimatorConfig config) : config_(config) {
  config_.validate();
}

void AirVelocityEstimator::reset() { last_ = AirVelEstimate{}; }

AirVelEstimate AirVelocityEstimator::update(const Vec3& v, const Rotation& R, const Vec3& omega,
                                            double pitot_reading, double dt) {
  const double threshold = last_.pitot_valid ? config_.pitot_min_fall : config_.pitot_min_rise;
  if (!(pitot_reading >= threshold)) {
    last_ = AirVelEstimate{};
    return last_;
  }
  const double va3 = estimate_va3(v, R, pitot_reading);
  const double va2 = step_va2(last_.v_a2_state, pitot_reading, va3, omega, R, config_.g0,
                              config_.lateral_gain, dt);
  last_.pitot_valid = true;
  last_.v_a2_state = va2;
  last_.v_a_hat = Vec3(pitot_reading, va2, va3);
  return last_;
}

}  // namespace vtol
