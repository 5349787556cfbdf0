#include "teleop/simulator.hpp"

#include <cmath>
#include <queue>
#include <sstream>

namespace teleop {

void ScenarioConfig::validate() const {
  gains.validate();
  leader_model.validate();
  follower_model.validate();
  if (control_period_us <= 0 || comm_period_us <= 0) {
    throw std::invalid_argument("ScenarioConfig: periods must be positive");
  }
  if (comm_period_us % control_period_us != 0) {
    throw std::invalid_argument(
        "ScenarioConfig: comm_period must be a multiple of control_period");
  }
  if (duration_us < 1000000) {
    throw std::invalid_argument("ScenarioConfig: duration must be at least 1 s");
  }
  if (transport_override) transport_override->validate();
  for (const auto& c : contacts) {
    if (c.end_us < c.start_us) {
      throw std::invalid_argument("ScenarioConfig: contact phase ends before it starts");
    }
    check_finite(c.torque, "contact torque");
  }
}

namespace {

// Tie-break order at equal timestamps: deliveries, follower control,
// leader control, comm ticks. Stable via an insertion counter.
enum class EventType : int {
  Delivery = 0,
  FollowerControl = 1,
  LeaderControl = 2,
  LeaderComm = 3,
  FollowerComm = 4,
};

struct Event {
  SimTime time;
  int prio;
  std::uint64_t order;
  EventType type;
  std::size_t payload;  // index into pending deliveries, or nominal tick
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.prio != b.prio) return a.prio > b.prio;
    return a.order > b.order;
  }
};

JointVector contact_at(const std::vector<ContactPhase>& contacts, SimTime t) {
  JointVector sum = JointVector::Zero();
  for (const auto& c : contacts) {
    if (t >= c.start_us && t < c.end_us) sum += c.torque;
  }
  return sum;
}

void check_state(const ArmState& s, const char* side, SimTime t) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!std::isfinite(s.q[i]) || !std::isfinite(s.qdot[i])) {
      std::ostringstream msg;
      msg << "dynamics diverged on " << side << " joint " << i << " at t=" << t << " us";
      throw std::runtime_error(msg.str());
    }
  }
}

}  // namespace

RunTrace run_scenario(const ScenarioConfig& config) {
  config.validate();

  RunTrace trace;
  trace.config = config;

  RngStream traj_rng(config.seed, 0);
  OperatorTrajectory traj = config.trajectory;
  if (config.randomize_phase) {
    for (int i = 0; i < kNumJoints; ++i) {
      traj.phase[i] += 2.0 * M_PI * traj_rng.next_uniform();
    }
  }

  const TransportConfig base_tc =
      config.transport_override ? *config.transport_override : preset(config.transport);
  Transport l2f(base_tc, RngStream(config.seed, 1));
  Transport f2l(base_tc, RngStream(config.seed, 2));

  ArmState leader, follower;
  // Zero-order held values on each side.
  ArmState held_leader;            // follower's view of the leader
  JointVector held_tau_ext = JointVector::Zero();  // leader's view of tau_ext

  std::priority_queue<Event, std::vector<Event>, EventLater> queue;
  std::vector<DeliveryEvent> deliveries;
  std::uint64_t order = 0;
  std::uint64_t seq_l2f = 0, seq_f2l = 0;

  auto push = [&](SimTime t, EventType type, std::size_t payload) {
    const int prio = std::min(static_cast<int>(type), 3);  // both comm kinds share rank 3
    queue.push(Event{t, prio, order++, type, payload});
  };

  for (SimTime t = 0; t <= config.duration_us; t += config.control_period_us) {
    push(t, EventType::FollowerControl, 0);
    push(t, EventType::LeaderControl, 0);
  }
  // Comm ticks scheduled by nominal index; gallop ticks lag the cycle
  // boundary by the sampled scheduling offset of the 20 Hz loop.
  for (SimTime nominal = 0; nominal < config.duration_us; nominal += config.comm_period_us) {
    push(nominal + l2f.next_comm_tick_lag(), EventType::LeaderComm, 0);
    push(nominal + f2l.next_comm_tick_lag(), EventType::FollowerComm, 0);
  }

  while (!queue.empty()) {
    Event ev = queue.top();
    queue.pop();
    if (ev.time > config.duration_us) continue;
    const SimTime t = ev.time;

    switch (ev.type) {
      case EventType::Delivery: {
        const DeliveryEvent& d = deliveries[ev.payload];
        if (d.packet.direction == Direction::LeaderToFollower) {
          held_leader.q = d.packet.q;
          held_leader.qdot = d.packet.qdot;
        } else {
          held_tau_ext = d.packet.tau_ext;
        }
        break;
      }
      case EventType::FollowerControl: {
        // The tick sample is recorded here, before either side steps, so
        // all columns refer to the state at t. The leader event at the
        // same timestamp fills in its torque column.
        TickSample sample;
        sample.t_us = t;
        sample.q_l = leader.q;
        sample.qd_l = leader.qdot;
        sample.q_f = follower.q;
        sample.qd_f = follower.qdot;
        sample.tau_l = JointVector::Zero();
        const JointVector contact = contact_at(config.contacts, t);
        const JointVector tau_d_f = follower_torque(config.gains, held_leader, follower);
        sample.tau_f = tau_d_f;
        trace.ticks.push_back(sample);
        if (t < config.duration_us) {
          follower = step_arm(config.follower_model, follower, tau_d_f + contact,
                              config.control_period_us);
          check_state(follower, "follower", t);
        }
        break;
      }
      case EventType::LeaderControl: {
        const ArmState ref = operator_reference(traj, t);
        const JointVector tau_d_l = leader_torque(config.gains.k, held_tau_ext);
        trace.ticks.back().tau_l = tau_d_l;
        if (t < config.duration_us) {
          const JointVector drive =
              config.gains.p.cwiseProduct(ref.q - leader.q) +
              config.gains.d.cwiseProduct(ref.qdot - leader.qdot) + tau_d_l;
          leader = step_arm(config.leader_model, leader, drive, config.control_period_us);
          check_state(leader, "leader", t);
        }
        break;
      }
      case EventType::LeaderComm: {
        ControlPacket pkt;
        pkt.seq = seq_l2f++;
        pkt.sent_at = t;
        pkt.direction = Direction::LeaderToFollower;
        pkt.q = leader.q;
        pkt.qdot = leader.qdot;
        DeliveryEvent d = l2f.submit(pkt, t);
        trace.packets.push_back({pkt.direction, pkt.seq, t, d.t_send_us, d.t_recv_us,
                                 d.deliver_at});
        deliveries.push_back(d);
        push(d.deliver_at, EventType::Delivery, deliveries.size() - 1);
        break;
      }
      case EventType::FollowerComm: {
        ControlPacket pkt;
        pkt.seq = seq_f2l++;
        pkt.sent_at = t;
        pkt.direction = Direction::FollowerToLeader;
        pkt.tau_ext = external_torque_estimate(config.gains, follower,
                                               contact_at(config.contacts, t));
        DeliveryEvent d = f2l.submit(pkt, t);
        trace.packets.push_back({pkt.direction, pkt.seq, t, d.t_send_us, d.t_recv_us,
                                 d.deliver_at});
        deliveries.push_back(d);
        push(d.deliver_at, EventType::Delivery, deliveries.size() - 1);
        break;
      }
    }
  }

  return trace;
}

bool BatchResult::all_ok() const {
  for (const auto& e : errors) {
    if (!e.empty()) return false;
  }
  return true;
}

BatchResult run_batch(const std::vector<ScenarioConfig>& configs, int repetitions) {
  if (repetitions < 1) {
    throw std::invalid_argument("run_batch: repetitions must be >= 1");
  }
  BatchResult result;
  for (const auto& base : configs) {
    for (int r = 0; r < repetitions; ++r) {
      ScenarioConfig cfg = base;
      cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(r));
      try {
        result.traces.push_back(run_scenario(cfg));
        result.errors.emplace_back();
      } catch (const std::exception& e) {
        result.traces.emplace_back();
        result.errors.emplace_back(base.name + " rep " + std::to_string(r) + ": " + e.what());
      }
    }
  }
  return result;
}

}  // namespace teleop
