#ifndef TELEOP_SIMULATOR_HPP
#define TELEOP_SIMULATOR_HPP

#include "teleop/dynamics.hpp"
#include "teleop/transport.hpp"

#include <optional>
#include <string>
#include <vector>

namespace teleop {

struct ContactPhase {
  SimTime start_us = 0;
  SimTime end_us = 0;
  JointVector torque = JointVector::Zero();
};

struct ScenarioConfig {
  std::string name = "scenario";
  TransportKind transport = TransportKind::Wired;
  /// When set, replaces the calibrated preset for both directions.
  std::optional<TransportConfig> transport_override;
  ControlGains gains;
  ArmModel leader_model;
  ArmModel follower_model;
  OperatorTrajectory trajectory;
  bool randomize_phase = false;  // draw per-joint phase once per run
  std::vector<ContactPhase> contacts;
  SimTime duration_us = 10000000;
  SimTime control_period_us = kControlPeriodUs;
  SimTime comm_period_us = kCommPeriodUs;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TickSample {
  SimTime t_us = 0;
  JointVector q_l, qd_l, q_f, qd_f, tau_l, tau_f;
};

struct PacketRecord {
  Direction direction = Direction::LeaderToFollower;
  std::uint64_t seq = 0;
  SimTime sent_at_us = 0;
  std::int64_t t_send_us = 0;
  std::int64_t t_recv_us = 0;
  SimTime deliver_at_us = 0;
};

struct RunTrace {
  ScenarioConfig config;
  std::vector<TickSample> ticks;
  std::vector<PacketRecord> packets;
};

/// Deterministic single-threaded event loop over the two 1 kHz control
/// loops and the 20 Hz comm loops. Identical config gives an identical
/// trace. Throws std::runtime_error if the dynamics diverge.
RunTrace run_scenario(const ScenarioConfig& config);

struct BatchResult {
  std::vector<RunTrace> traces;         // successful runs, input order
  std::vector<std::string> errors;      // empty string = run ok
  bool all_ok() const;
};

/// Repetition r of config c gets seed derive_seed(c.seed, r); a failed run
/// is recorded without aborting the rest of the batch.
BatchResult run_batch(const std::vector<ScenarioConfig>& configs, int repetitions);

}  // namespace teleop

#endif  // TELEOP_SIMULATOR_HPP
