#include "teleop/transport.hpp"

#include <algorithm>
#include <cmath>

namespace teleop {

TransportKind transport_kind_from_string(const std::string& s) {
  if (s == "wired") return TransportKind::Wired;
  if (s == "wireless") return TransportKind::Wireless;
  if (s == "gallop") return TransportKind::Gallop;
  throw std::invalid_argument("unknown transport kind: " + s);
}

const char* to_string(TransportKind k) {
  switch (k) {
    case TransportKind::Wired: return "wired";
    case TransportKind::Wireless: return "wireless";
    case TransportKind::Gallop: return "gallop";
  }
  return "?";
}

void DelaySampler::validate() const {
  if (shift_us < 0.0) throw std::invalid_argument("DelaySampler: negative shift");
  if (family == Family::ShiftedGamma && (shape <= 0.0 || scale_us <= 0.0)) {
    throw std::invalid_argument("DelaySampler: gamma shape and scale must be positive");
  }
}

double sample_delay(const DelaySampler& sampler, RngStream& rng) {
  sampler.validate();
  switch (sampler.family) {
    case DelaySampler::Family::Constant:
      return sampler.shift_us;
    case DelaySampler::Family::ShiftedGamma:
      return sampler.shift_us + rng.next_gamma(sampler.shape, sampler.scale_us);
  }
  return 0.0;
}

void TransportConfig::validate() const {
  send_overhead.validate();
  receive_path.validate();
  if (spike_prob < 0.0 || spike_prob > 1.0) {
    throw std::invalid_argument("TransportConfig: spike_prob outside [0,1]");
  }
  if (spike_prob > 0.0) spike_delay.validate();
  if (kind == TransportKind::Gallop && cycle_us <= 0) {
    throw std::invalid_argument("TransportConfig: gallop requires cycle_us > 0");
  }
}

Transport::Transport(TransportConfig config, RngStream rng)
    : config_(std::move(config)), rng_(rng) {
  config_.validate();
}

DeliveryEvent Transport::submit(const ControlPacket& packet, SimTime now) {
  std::int64_t t_send = 0;
  std::int64_t t_recv = 0;
  if (config_.kind == TransportKind::Gallop) {
    // Wait for the next cycle boundary, plus constant processing overhead.
    const std::int64_t cycle = config_.cycle_us;
    t_send = cycle - (now % cycle) +
             static_cast<std::int64_t>(std::llround(config_.send_overhead.shift_us));
    t_recv = static_cast<std::int64_t>(std::llround(sample_delay(config_.receive_path, rng_)));
  } else {
    t_send = static_cast<std::int64_t>(std::llround(sample_delay(config_.send_overhead, rng_)));
    double recv = sample_delay(config_.receive_path, rng_);
    if (config_.kind == TransportKind::Wireless && config_.spike_prob > 0.0 &&
        rng_.next_uniform() < config_.spike_prob) {
      recv += sample_delay(config_.spike_delay, rng_);
    }
    t_recv = static_cast<std::int64_t>(std::llround(recv));
  }

  const std::int64_t t_recv_sampled = t_recv;
  SimTime deliver_at = now + t_send + t_recv;
  if (deliver_at < last_deliver_at_) {
    // Reliable-stream head-of-line blocking surfaces as receive lateness.
    deliver_at = last_deliver_at_;
    t_recv = deliver_at - now - t_send;
  }
  last_deliver_at_ = deliver_at;

  DeliveryEvent ev;
  ev.packet = packet;
  ev.deliver_at = deliver_at;
  ev.t_send_us = t_send;
  ev.t_recv_us = t_recv;
  ev.t_recv_sampled_us = t_recv_sampled;
  return ev;
}

std::int64_t Transport::next_comm_tick_lag() {
  if (config_.kind != TransportKind::Gallop) return 0;
  return static_cast<std::int64_t>(std::llround(sample_delay(config_.sender_lag, rng_)));
}

TransportConfig preset(TransportKind kind) {
  TransportConfig c;
  c.kind = kind;
  using F = DelaySampler::Family;
  switch (kind) {
    case TransportKind::Wired:
      // T_send mean 0.116 ms, T_recv mean ~1.26 ms, both right-skewed.
      c.send_overhead = {F::ShiftedGamma, 30.0, 0.459, 187.0};
      c.receive_path = {F::ShiftedGamma, 200.0, 0.20, 5300.0};
      break;
    case TransportKind::Wireless:
      // T_send mean 0.178 ms; T_recv mean 12.9 ms dominated by rare ~1 s
      // retransmission spikes that also stall later packets (head-of-line).
      c.send_overhead = {F::ShiftedGamma, 40.0, 0.615, 224.0};
      c.receive_path = {F::ShiftedGamma, 500.0, 1.2, 2000.0};
      c.spike_prob = 0.01;
      c.spike_delay = {F::ShiftedGamma, 0.0, 4.0, 250000.0};
      break;
    case TransportKind::Gallop:
      // Cyclic schedule: send waits out the 50 ms cycle; receive path is
      // short and tight. The comm loop lags the boundary by ~0.9 ms.
      c.cycle_us = 50000;
      c.send_overhead = {F::Constant, 0.0, 0.0, 0.0};
      c.receive_path = {F::ShiftedGamma, 200.0, 0.66, 739.0};
      c.sender_lag = {F::ShiftedGamma, 0.0, 0.3125, 2880.0};
      break;
  }
  return c;
}

TransportConfig preset(const std::string& kind) {
  return preset(transport_kind_from_string(kind));
}

CalibrationDraws calibration_draws(TransportKind kind, std::uint64_t seed,
                                   std::size_t n) {
  Transport tp(preset(kind), RngStream(seed, 0));
  CalibrationDraws out;
  out.t_send_us.reserve(n);
  out.t_recv_us.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SimTime nominal = static_cast<SimTime>(i) * kCommPeriodUs;
    SimTime now = nominal + tp.next_comm_tick_lag();
    ControlPacket pkt;
    pkt.seq = i;
    pkt.sent_at = now;
    DeliveryEvent ev = tp.submit(pkt, now);
    out.t_send_us.push_back(ev.t_send_us);
    out.t_recv_us.push_back(ev.t_recv_sampled_us);
  }
  return out;
}

}  // namespace teleop
