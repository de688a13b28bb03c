#pragma once

#include <optional>

#include "vtol/airframe.hpp"
#include "vtol/desired_frame.hpp"
#include "vtol/geom3.hpp"

namespace vtol {

inline constexpr double kMinRateGain = 0.05;

struct RateGains {
  double k_i = 4.0;  // 1/s
  double k_j = 4.0;
  double k_k = 4.0;
  Vec3 k_gamma = Vec3(20.0, 20.0, 15.0);  // 1/s, diagonal

  void validate() const;
};

/// Angular velocity of the desired frame, inertial coordinates.
struct FrameRate {
  Vec3 omega_bar = Vec3::Zero();
  bool valid = false;
};

enum class TorqueMode { Simple, Full };

/// Unfiltered frame angular velocity from two consecutive samples:
///   high speed: k x k' + (k . (i x i')) k
///   low speed:  k x k' + (k . (j x j')) k, j = j_d / |j_d|
/// Invalid when the samples belong to different regimes.
FrameRate frame_rate(const DesiredFrame& prev, const DesiredFrame& now, double dt);

/// Same composition with first-order low-pass filtered axis derivatives.
class FrameRateEstimator {
 public:
  explicit FrameRateEstimator(double time_constant = 0.05) : tau_(time_constant) {}

  FrameRate update(const DesiredFrame& frame, double dt);
  void reset();

 private:
  double tau_;
  std::optional<DesiredFrame> prev_;
  Vec3 i_dot_ = Vec3::Zero();
  Vec3 j_dot_ = Vec3::Zero();
  Vec3 k_dot_ = Vec3::Zero();
};

/// w* = w_bar + k_i (i x i_bar) + k_j (j x j_bar) + k_k (k x k_bar), returned
/// in body coordinates.
Vec3 omega_star_high(const DesiredFrame& frame, const Rotation& R, const FrameRate& rate,
                     const RateGains& gains);

/// w* = w_bar + k_j (j x j_d) + k_k (k x k_bar) with j_d unnormalized, body
/// coordinates.
Vec3 omega_star_low(const Vec3& j_d, const Vec3& k_bar, const Rotation& R, const FrameRate& rate,
                    const RateGains& gains);

/// Simple: -k_gamma J (w - w*). Full adds w x J w* + J (w* - w*_prev) / dt.
Vec3 torque(const Vec3& omega, const Vec3& omega_star, const Vec3& omega_star_prev, double dt,
            const AircraftParams& params, const RateGains& gains, TorqueMode mode);

/// Torque law with a filtered derivative of w* for the full mode.
class TorqueController {
 public:
  TorqueController(RateGains gains, TorqueMode mode, double derivative_time_constant = 0.02);

  Vec3 update(const Vec3& omega, const Vec3& omega_star, double dt, const AircraftParams& params);
  void reset();

 private:
  RateGains gains_;
  TorqueMode mode_;
  double tau_;
  std::optional<Vec3> prev_;
  Vec3 omega_star_dot_ = Vec3::Zero();
};

}  // namespace vtol
