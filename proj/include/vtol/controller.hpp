#pragma once

#include <optional>
#include <string>

#include "vtol/allocation.hpp"
#include "vtol/airvel_estimator.hpp"
#include "vtol/attitude_rate.hpp"
#include "vtol/desired_frame.hpp"
#include "vtol/dynamics.hpp"
#include "vtol/guidance.hpp"
#include "vtol/scenario.hpp"

namespace vtol {

enum class MissionPhase { Hold = 0, Takeoff = 1, Path = 2, Track = 3 };

std::string to_string(MissionPhase p);

struct TrajectoryPoint {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};

/// Rest-to-rest quintic from `from` to `to` over `duration`, held afterwards.
TrajectoryPoint climb_reference(double t, const Vec3& from, const Vec3& to, double duration);

struct ControlOutput {
  MissionPhase phase = MissionPhase::Hold;
  Vec3 xi = Vec3::Zero();
  double v_ref = 0.0;
  double cross_track = 0.0;
  double speed_error = 0.0;
  AirVelEstimate estimate;
  Vec3 v_a_inertial = Vec3::Zero();  // air velocity fed to the frame construction
  FrameSelector::Selection selection;
  FrameRate frame_rate;
  Vec3 omega_star = Vec3::Zero();  // body
  PlantInput command;
  std::optional<AllocationResult> allocation;
  std::string allocation_error;
};

/// Guidance, air-velocity estimation, desired frame, rate and torque laws and
/// allocation, run once per control cycle.
class Controller {
 public:
  explicit Controller(const Scenario& scenario);

  /// `v_a_true` (inertial) is used only when the scenario asks for the true
  /// air velocity instead of the estimate.
  ControlOutput update(double t, const RigidState& s, double pitot_reading, const Vec3& v_a_true,
                       double dt);

  MissionPhase phase_at(double t) const;

 private:
  Vec3 guidance(double t, const RigidState& s, ControlOutput& out);

  Scenario scenario_;
  CirclePath path_;
  PathFollower follower_;
  AirVelocityEstimator estimator_;
  FrameSelector selector_;
  FrameRateEstimator frame_rate_;
  TorqueController torque_;
};

}  // namespace vtol
