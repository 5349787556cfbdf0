#ifndef TELEOP_TRANSPORT_HPP
#define TELEOP_TRANSPORT_HPP

#include "teleop/core.hpp"

#include <vector>

namespace teleop {

enum class TransportKind { Wired, Wireless, Gallop };

TransportKind transport_kind_from_string(const std::string& s);
const char* to_string(TransportKind k);

/// Nonnegative delay distribution: a constant, or a gamma shifted right by
/// a fixed floor. All quantities in microseconds.
struct DelaySampler {
  enum class Family { Constant, ShiftedGamma };
  Family family = Family::Constant;
  double shift_us = 0.0;
  double shape = 1.0;
  double scale_us = 0.0;

  void validate() const;
};

double sample_delay(const DelaySampler& sampler, RngStream& rng);

/// One-way transport model. Wired and wireless draw both path components
/// from samplers (wireless adds a retransmission spike to the receive path
/// with probability spike_prob). Gallop waits for the next cycle boundary,
/// so its send delay is a deterministic function of the submit phase.
struct TransportConfig {
  TransportKind kind = TransportKind::Wired;
  DelaySampler send_overhead;
  DelaySampler receive_path;
  double spike_prob = 0.0;          // wireless only
  DelaySampler spike_delay;         // wireless only
  std::int64_t cycle_us = 0;        // gallop only
  /// Gallop sender-side scheduling lag of the 20 Hz comm loop relative to
  /// the cycle boundary; sampled per tick by the caller that schedules
  /// submissions (see gallop_comm_tick_lag).
  DelaySampler sender_lag;

  void validate() const;
};

struct DeliveryEvent {
  ControlPacket packet;
  SimTime deliver_at = 0;
  std::int64_t t_send_us = 0;
  std::int64_t t_recv_us = 0;
  /// Receive-path delay as drawn from the channel model, before the
  /// in-order clamp folds any head-of-line wait into t_recv_us.
  std::int64_t t_recv_sampled_us = 0;
};

/// Stateful one-direction channel: owns the rng stream and enforces
/// reliable-stream in-order delivery (a late packet delays its successors;
/// the head-of-line wait is folded into t_recv so
/// deliver_at == sent_at + t_send + t_recv always holds).
class Transport {
 public:
  Transport(TransportConfig config, RngStream rng);

  DeliveryEvent submit(const ControlPacket& packet, SimTime now);

  /// Sender-side comm-loop lag for gallop scheduling (0 for other kinds).
  std::int64_t next_comm_tick_lag();

  const TransportConfig& config() const { return config_; }

 private:
  TransportConfig config_;
  RngStream rng_;
  SimTime last_deliver_at_ = 0;
};

/// Calibrated configuration for one of the three benchmark channels.
TransportConfig preset(TransportKind kind);
TransportConfig preset(const std::string& kind);

/// Per-packet delay draws from the channel model: packets submitted on the
/// 20 Hz comm schedule (gallop ticks lag the cycle boundary by the sampled
/// scheduling lag), recording each packet's own sampled (t_send, t_recv)
/// in us. Head-of-line blocking is a delivery-ordering effect and is not
/// part of the drawn per-packet statistics.
struct CalibrationDraws {
  std::vector<std::int64_t> t_send_us;
  std::vector<std::int64_t> t_recv_us;
};

CalibrationDraws calibration_draws(TransportKind kind, std::uint64_t seed,
                                   std::size_t n);

}  // namespace teleop

#endif  // TELEOP_TRANSPORT_HPP
