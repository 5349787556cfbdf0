#include "teleop/dynamics.hpp"

#include <cmath>

namespace teleop {

void ControlGains::validate() const {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!(p[i] > 0.0) || !(d[i] > 0.0)) {
      throw std::invalid_argument("ControlGains: P and D must be positive (joint " +
                                  std::to_string(i) + ")");
    }
  }
  if (!(k > 0.0 && k < 1.0)) {
    throw std::invalid_argument("ControlGains: K must lie in (0,1)");
  }
}

void ArmModel::validate() const {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!(inertia[i] > 0.0)) {
      throw std::invalid_argument("ArmModel: inertia must be positive (joint " +
                                  std::to_string(i) + ")");
    }
    if (damping[i] < 0.0) {
      throw std::invalid_argument("ArmModel: damping must be nonnegative (joint " +
                                  std::to_string(i) + ")");
    }
  }
}

JointVector leader_torque(double k, const JointVector& tau_ext_follower) {
  if (!(k > 0.0 && k < 1.0)) {
    throw std::invalid_argument("leader_torque: K must lie in (0,1)");
  }
  return k * tau_ext_follower;
}

JointVector follower_torque(const ControlGains& gains, const ArmState& leader,
                            const ArmState& follower) {
  return gains.p.cwiseProduct(leader.q - follower.q) +
         gains.d.cwiseProduct(leader.qdot - follower.qdot);
}

ArmState step_arm(const ArmModel& model, const ArmState& state,
                  const JointVector& applied_torque, SimTime dt_us) {
  check_finite(applied_torque, "step_arm torque");
  const double dt = static_cast<double>(dt_us) * 1e-6;
  ArmState next;
  next.qdot = state.qdot +
              dt * (applied_torque - model.damping.cwiseProduct(state.qdot))
                       .cwiseQuotient(model.inertia);
  next.q = state.q + dt * next.qdot;
  for (int i = 0; i < kNumJoints; ++i) {
    if (next.q[i] > kJointLimitRad) {
      next.q[i] = kJointLimitRad;
      next.qdot[i] = 0.0;
    } else if (next.q[i] < -kJointLimitRad) {
      next.q[i] = -kJointLimitRad;
      next.qdot[i] = 0.0;
    }
  }
  return next;
}

JointVector external_torque_estimate(const ControlGains&, const ArmState&,
                                     const JointVector& contact) {
  check_finite(contact, "contact torque");
  return contact;
}

namespace {

ArmState sinusoidal_reference(const OperatorTrajectory& traj, SimTime t) {
  const double ts = static_cast<double>(t) * 1e-6;
  ArmState ref;
  for (int i = 0; i < kNumJoints; ++i) {
    const double w = 2.0 * M_PI * traj.frequency[i];
    ref.q[i] = traj.amplitude[i] * std::sin(w * ts + traj.phase[i]);
    ref.qdot[i] = traj.amplitude[i] * w * std::cos(w * ts + traj.phase[i]);
  }
  return ref;
}

// Smoothstep blend between consecutive waypoints: C1 at segment joints.
ArmState waypoint_reference(const OperatorTrajectory& traj, SimTime t) {
  ArmState ref;
  if (traj.waypoints.empty()) return ref;
  SimTime cursor = 0;
  const Waypoint* prev = &traj.waypoints.front();
  ref.q = prev->q;
  cursor += prev->hold_us;
  for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
    const Waypoint& next = traj.waypoints[i];
    if (t < cursor) {  // holding at prev
      ref.q = prev->q;
      ref.qdot.setZero();
      return ref;
    }
    if (t < cursor + traj.transition_us) {
      const double tau = static_cast<double>(t - cursor) /
                         static_cast<double>(traj.transition_us);
      const double s = tau * tau * (3.0 - 2.0 * tau);
      const double sdot = 6.0 * tau * (1.0 - tau) /
                          (static_cast<double>(traj.transition_us) * 1e-6);
      ref.q = prev->q + s * (next.q - prev->q);
      ref.qdot = sdot * (next.q - prev->q);
      return ref;
    }
    cursor += traj.transition_us;
    prev = &next;
    cursor += next.hold_us;
  }
  ref.q = prev->q;
  ref.qdot.setZero();
  return ref;
}

}  // namespace

ArmState operator_reference(const OperatorTrajectory& traj, SimTime t) {
  return traj.kind == OperatorTrajectory::Kind::Sinusoidal
             ? sinusoidal_reference(traj, t)
             : waypoint_reference(traj, t);
}

double kinetic_energy(const ArmModel& model, const ArmState& state) {
  return 0.5 * model.inertia.cwiseProduct(state.qdot.cwiseProduct(state.qdot)).sum();
}

}  // namespace teleop
