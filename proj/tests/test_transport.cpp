#include "teleop/transport.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace teleop;

TEST_CASE("constant sampler returns the shift exactly") {
  DelaySampler s{DelaySampler::Family::Constant, 500.0, 0.0, 0.0};
  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) CHECK(sample_delay(s, rng) == 500.0);
}

TEST_CASE("shifted gamma sampler mean matches shape*scale") {
  DelaySampler s{DelaySampler::Family::ShiftedGamma, 0.0, 1.0, 1000.0};
  RngStream rng(7, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_delay(s, rng);
  CHECK(sum / n == doctest::Approx(1000.0).epsilon(0.02));
}

TEST_CASE("every shifted gamma draw is at least the shift") {
  DelaySampler s{DelaySampler::Family::ShiftedGamma, 30.0, 0.459, 187.0};
  RngStream rng(3, 0);
  for (int i = 0; i < 10000; ++i) CHECK(sample_delay(s, rng) >= 30.0);
}

TEST_CASE("sampler rejects invalid parameters") {
  DelaySampler s{DelaySampler::Family::ShiftedGamma, 0.0, -1.0, 100.0};
  RngStream rng(1, 0);
  CHECK_THROWS_AS(sample_delay(s, rng), std::invalid_argument);
  s = {DelaySampler::Family::ShiftedGamma, -5.0, 1.0, 100.0};
  CHECK_THROWS_AS(sample_delay(s, rng), std::invalid_argument);
}

TEST_CASE("spike_prob zero reduces wireless to its base sampler") {
  TransportConfig cfg = preset(TransportKind::Wireless);
  cfg.spike_prob = 0.0;
  Transport with(cfg, RngStream(11, 0));

  TransportConfig base = cfg;
  Transport without(base, RngStream(11, 0));
  for (int i = 0; i < 200; ++i) {
    ControlPacket pkt;
    pkt.seq = i;
    pkt.sent_at = i * kCommPeriodUs;
    auto a = with.submit(pkt, pkt.sent_at);
    auto b = without.submit(pkt, pkt.sent_at);
    CHECK(a.t_recv_us == b.t_recv_us);
  }
}

TEST_CASE("gallop send delay is the exact wait to the next cycle boundary") {
  TransportConfig cfg = preset(TransportKind::Gallop);
  cfg.cycle_us = 50000;
  cfg.send_overhead = {DelaySampler::Family::Constant, 0.0, 0.0, 0.0};
  Transport tp(cfg, RngStream(2, 0));
  ControlPacket pkt;
  pkt.sent_at = 1000;
  auto ev = tp.submit(pkt, 1000);
  CHECK(ev.t_send_us == 49000);

  // Same phase -> identical t_send.
  ControlPacket pkt2;
  pkt2.sent_at = 151000;
  auto ev2 = tp.submit(pkt2, 151000);
  CHECK(ev2.t_send_us == 49000);
}

TEST_CASE("in-order delivery clamp folds into t_recv") {
  TransportConfig cfg;
  cfg.kind = TransportKind::Wired;
  cfg.send_overhead = {DelaySampler::Family::Constant, 0.0, 0.0, 0.0};
  cfg.receive_path = {DelaySampler::Family::Constant, 100000.0, 0.0, 0.0};
  Transport tp(cfg, RngStream(1, 0));

  ControlPacket a;
  a.sent_at = 0;
  auto ev_a = tp.submit(a, 0);
  CHECK(ev_a.deliver_at == 100000);

  // High-variance delays force reorderings; the clamp must hold the
  // delivery order and keep deliver_at == sent_at + t_send + t_recv.
  cfg.receive_path = {DelaySampler::Family::ShiftedGamma, 0.0, 0.5, 200000.0};
  Transport tp2(cfg, RngStream(9, 0));
  SimTime prev = 0;
  int clamped = 0;
  for (int i = 0; i < 500; ++i) {
    ControlPacket pkt;
    pkt.seq = i;
    pkt.sent_at = i * kCommPeriodUs;
    auto ev = tp2.submit(pkt, pkt.sent_at);
    CHECK(ev.deliver_at >= prev);
    CHECK(ev.deliver_at == pkt.sent_at + ev.t_send_us + ev.t_recv_us);
    if (ev.deliver_at == prev) ++clamped;
    prev = ev.deliver_at;
  }
  CHECK(clamped > 0);
}

TEST_CASE("per-direction delivery order equals send order for all presets") {
  for (auto kind : {TransportKind::Wired, TransportKind::Wireless, TransportKind::Gallop}) {
    Transport tp(preset(kind), RngStream(77, 0));
    SimTime prev = -1;
    for (int i = 0; i < 2000; ++i) {
      ControlPacket pkt;
      pkt.seq = i;
      pkt.sent_at = i * kCommPeriodUs;
      auto ev = tp.submit(pkt, pkt.sent_at);
      CHECK(ev.deliver_at >= prev);
      CHECK(ev.t_send_us >= 0);
      CHECK(ev.t_recv_us >= 0);
      prev = ev.deliver_at;
    }
  }
}

TEST_CASE("preset statistics track the calibration targets") {
  const std::size_t n = 30000;

  auto mean = [](const std::vector<std::int64_t>& v) {
    double s = 0.0;
    for (auto x : v) s += static_cast<double>(x);
    return s / static_cast<double>(v.size()) * 1e-3;  // ms
  };
  auto sigma = [&](const std::vector<std::int64_t>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (auto x : v) {
      const double d = static_cast<double>(x) * 1e-3 - m;
      ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(v.size()));
  };

  SUBCASE("wired") {
    auto draws = calibration_draws(TransportKind::Wired, 1234, n);
    CHECK(mean(draws.t_send_us) == doctest::Approx(0.116).epsilon(0.15));
  }
  SUBCASE("wireless") {
    auto draws = calibration_draws(TransportKind::Wireless, 1234, n);
    CHECK(mean(draws.t_send_us) == doctest::Approx(0.178).epsilon(0.15));
    CHECK(mean(draws.t_recv_us) == doctest::Approx(12.9).epsilon(0.20));
    CHECK(*std::max_element(draws.t_recv_us.begin(), draws.t_recv_us.end()) > 400000);
  }
  SUBCASE("gallop") {
    auto draws = calibration_draws(TransportKind::Gallop, 1234, n);
    CHECK(mean(draws.t_send_us) == doctest::Approx(49.1).epsilon(0.05));
    CHECK(sigma(draws.t_send_us) <= 2.0);
    CHECK(sigma(draws.t_recv_us) <= 1.1);
  }
}

TEST_CASE("wireless receive delay is heavy-tailed") {
  auto draws = calibration_draws(TransportKind::Wireless, 555, 30000);
  std::vector<std::int64_t> sorted = draws.t_recv_us;
  std::sort(sorted.begin(), sorted.end());
  const double median = static_cast<double>(sorted[sorted.size() / 2]);
  const double p999 = static_cast<double>(sorted[sorted.size() * 999 / 1000]);
  CHECK(p999 > 20.0 * median);
}

TEST_CASE("calibration draws are reproducible bitwise under a fixed seed") {
  for (auto kind : {TransportKind::Wired, TransportKind::Wireless, TransportKind::Gallop}) {
    auto a = calibration_draws(kind, 42, 5000);
    auto b = calibration_draws(kind, 42, 5000);
    CHECK(a.t_send_us == b.t_send_us);
    CHECK(a.t_recv_us == b.t_recv_us);
  }
}

TEST_CASE("unknown preset kind is rejected") {
  CHECK_THROWS_AS(preset("carrier-pigeon"), std::invalid_argument);
}
