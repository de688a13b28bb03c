#pragma once

#include "vtol/geom3.hpp"

namespace vtol {

struct AirVelEstimatorConfig {
  double pitot_min_rise = 2.0;  // m/s, reading at which the pitot becomes trusted
  double pitot_min_fall = 1.5;  // m/s, reading below which it is dropped
  double lateral_gain = 1.0;    // 1/s, damping of the lateral estimator
  double g0 = 9.81;

  void validate() const;
};

struct AirVelEstimate {
  Vec3 v_a_hat = Vec3::Zero();  // body coordinates, m/s
  bool pitot_valid = false;
  double v_a2_state = 0.0;      // lateral estimator state, m/s
};

inline constexpr double kVerticalAttitudeGuard = 0.05;

/// Vertical air-velocity component under a horizontal-wind, small-sideslip
/// assumption: k0.(v - v_a1 i) / (k0.k). Throws SingularConfiguration when
/// |k0.k| <= kVerticalAttitudeGuard.
double estimate_va3(const Vec3& v, const Rotation& R, double v_a1);

/// Forward-Euler step of the lateral estimator
///   d/dt v_a2 = g0 (k0.j) + (v_a3 w1 - v_a1 w3) - gain v_a2.
double step_va2(double v_a2, double v_a1, double v_a3_hat, const Vec3& omega, const Rotation& R,
                double g0, double gain, double dt);

/// Pitot-gated 3-axis air-velocity estimator. Updates must be applied in time
/// order; instances are independent.
class AirVelocityEstimator {
 public:
  explicit AirVelocityEstimator(AirVelEstimatorConfig config = {});

  AirVelEstimate update(const Vec3& v, const Rotation& R, const Vec3& omega,
                        double pitot_reading, double dt);

  const AirVelEstimate& last() const { return last_; }
  void reset();

 private:
  AirVelEstimatorConfig config_;
  AirVelEstimate last_;
};

}  // namespace vtol
