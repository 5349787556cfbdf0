#ifndef TELEOP_DYNAMICS_HPP
#define TELEOP_DYNAMICS_HPP

#include "teleop/core.hpp"

#include <vector>

namespace teleop {

/// Soft joint limit: |q_i| is clamped to this, zeroing velocity at the stop.
inline constexpr double kJointLimitRad = 2.0 * M_PI;

struct ArmState {
  JointVector q = JointVector::Zero();
  JointVector qdot = JointVector::Zero();
};

/// Diagonal PD gains plus the force-feedback scale K of the leader law.
struct ControlGains {
  JointVector p = JointVector::Constant(50.0);
  JointVector d = JointVector::Constant(14.1);
  double k = 0.3;

  void validate() const;
};

/// Decoupled diagonal-inertia double integrator with viscous damping.
struct ArmModel {
  JointVector inertia = JointVector::Ones();
  JointVector damping = JointVector::Constant(0.5);

  void validate() const;
};

struct Waypoint {
  JointVector q = JointVector::Zero();
  SimTime hold_us = 0;
};

/// Synthetic operator: either per-joint sinusoids or a piecewise-linear
/// waypoint schedule, both continuous in position and velocity.
struct OperatorTrajectory {
  enum class Kind { Sinusoidal, Waypoint };
  Kind kind = Kind::Sinusoidal;

  JointVector amplitude = JointVector::Zero();  // rad
  JointVector frequency = JointVector::Zero();  // Hz
  JointVector phase = JointVector::Zero();      // rad

  std::vector<Waypoint> waypoints;              // Waypoint kind only
  SimTime transition_us = 1000000;              // ramp time between waypoints
};

/// Eq-style leader command torque: K * tau_ext, K in (0,1).
JointVector leader_torque(double k, const JointVector& tau_ext_follower);

/// Follower tracking torque, stabilizing sign convention:
/// tau_i = P_i (qL_i - qF_i) + D_i (qdL_i - qdF_i).
JointVector follower_torque(const ControlGains& gains, const ArmState& leader,
                            const ArmState& follower);

/// Semi-implicit Euler step with joint-limit clamp.
ArmState step_arm(const ArmModel& model, const ArmState& state,
                  const JointVector& applied_torque, SimTime dt_us);

/// Scripted contact torque passes through as the transmitted estimate.
JointVector external_torque_estimate(const ControlGains& gains,
                                     const ArmState& follower,
                                     const JointVector& contact);

/// Reference (q, qdot) for the synthetic operator at time t.
ArmState operator_reference(const OperatorTrajectory& traj, SimTime t);

double kinetic_energy(const ArmModel& model, const ArmState& state);

}  // namespace teleop

#endif  // TELEOP_DYNAMICS_HPP
