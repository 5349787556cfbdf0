#include "teleop/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace teleop;

namespace {

RunTrace trace_from(const std::vector<JointVector>& q_l,
                    const std::vector<JointVector>& q_f) {
  RunTrace trace;
  for (std::size_t i = 0; i < q_l.size(); ++i) {
    TickSample t;
    t.t_us = static_cast<SimTime>(i) * 1000;
    t.q_l = q_l[i];
    t.q_f = q_f[i];
    t.qd_l = JointVector::Zero();
    t.qd_f = JointVector::Zero();
    t.tau_l = t.tau_f = JointVector::Zero();
    trace.ticks.push_back(t);
  }
  return trace;
}

}  // namespace

TEST_CASE("error_series basics") {
  const auto c5 = JointVector::Constant(0.5).eval();
  const auto c3 = JointVector::Constant(0.3).eval();
  auto trace = trace_from({c5, c5, c5}, {c3, c3, c3});
  auto s = error_series(trace);
  REQUIRE(s.e.size() == 3);
  for (const auto& e : s.e) CHECK(e.isApprox(JointVector::Constant(0.2)));

  // identical series -> zero; swapping sides negates
  auto zero = error_series(trace_from({c5, c5}, {c5, c5}));
  for (const auto& e : zero.e) CHECK(e.isZero());
  auto swapped = error_series(trace_from({c3, c3, c3}, {c5, c5, c5}));
  for (const auto& e : swapped.e) CHECK(e.isApprox(JointVector::Constant(-0.2)));
}

TEST_CASE("rms_per_joint hand computations") {
  std::vector<JointVector> series(2, JointVector::Zero());
  series[0][0] = 3.0;
  series[1][0] = 4.0;
  auto rms = rms_per_joint(series);
  CHECK(rms[0] == doctest::Approx(std::sqrt(25.0 / 2.0)));  // 3.5355339
  CHECK(rms[1] == 0.0);

  std::vector<JointVector> constant(10, JointVector::Constant(-2.5));
  rms = rms_per_joint(constant);
  for (double r : rms) CHECK(r == doctest::Approx(2.5));

  CHECK_THROWS_AS(rms_per_joint({}), std::invalid_argument);
}

TEST_CASE("error_index sums per-joint rms") {
  ErrorSeries s;
  JointVector v;
  for (int i = 0; i < kNumJoints; ++i) v[i] = i + 1.0;
  s.e = {v};
  s.edot = {JointVector::Zero()};
  auto idx = error_index(s);
  CHECK(idx.epsilon == doctest::Approx(28.0));
  CHECK(idx.epsilon_dot == 0.0);
}

TEST_CASE("epsilon is invariant under time permutation and scales linearly") {
  RngStream rng(8, 0);
  ErrorSeries s;
  for (int t = 0; t < 200; ++t) {
    JointVector e, ed;
    for (int i = 0; i < kNumJoints; ++i) {
      e[i] = rng.next_uniform() - 0.5;
      ed[i] = rng.next_uniform() - 0.5;
    }
    s.e.push_back(e);
    s.edot.push_back(ed);
  }
  const double eps = error_index(s).epsilon;

  ErrorSeries shuffled = s;
  std::reverse(shuffled.e.begin(), shuffled.e.end());
  CHECK(error_index(shuffled).epsilon == doctest::Approx(eps).epsilon(1e-12));

  ErrorSeries scaled = s;
  for (auto& e : scaled.e) e *= 3.0;
  CHECK(error_index(scaled).epsilon == doctest::Approx(3.0 * eps).epsilon(1e-12));
}

TEST_CASE("rms bounds: between |mean| and max") {
  RngStream rng(9, 0);
  std::vector<JointVector> series;
  JointVector mean = JointVector::Zero();
  JointVector max_abs = JointVector::Zero();
  for (int t = 0; t < 500; ++t) {
    JointVector e;
    for (int i = 0; i < kNumJoints; ++i) e[i] = 2.0 * rng.next_uniform() - 0.7;
    series.push_back(e);
    mean += e;
    max_abs = max_abs.cwiseMax(e.cwiseAbs());
  }
  mean /= 500.0;
  auto rms = rms_per_joint(series);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK(rms[i] <= max_abs[i] + 1e-12);
    CHECK(rms[i] >= std::abs(mean[i]) - 1e-12);
  }
}

TEST_CASE("timing_stats hand computation with interpolated quartiles") {
  auto st = timing_stats({1000, 2000, 3000, 4000, 5000});
  CHECK(st.mean_ms == doctest::Approx(3.0));
  CHECK(st.range_ms == doctest::Approx(4.0));
  CHECK(st.iqr_ms == doctest::Approx(2.0));
  CHECK(st.sigma_ms == doctest::Approx(std::sqrt(2.0)));
  CHECK(st.n == 5);
}

TEST_CASE("timing_stats degenerate inputs") {
  auto st = timing_stats({700, 700, 700});
  CHECK(st.mean_ms == doctest::Approx(0.7));
  CHECK(st.sigma_ms == 0.0);
  CHECK(st.range_ms == 0.0);
  CHECK(st.iqr_ms == 0.0);

  st = timing_stats({1234});
  CHECK(st.mean_ms == doctest::Approx(1.234));
  CHECK(st.sigma_ms == 0.0);
  CHECK(st.range_ms == 0.0);

  CHECK_THROWS_AS(timing_stats({}), std::invalid_argument);
}

TEST_CASE("timing_stats invariant under self-concatenation") {
  std::vector<std::int64_t> v = {1000, 2000, 3000, 4000, 5000};
  auto once = timing_stats(v);
  std::vector<std::int64_t> twice = v;
  twice.insert(twice.end(), v.begin(), v.end());
  auto dup = timing_stats(twice);
  CHECK(dup.mean_ms == doctest::Approx(once.mean_ms));
  CHECK(dup.range_ms == doctest::Approx(once.range_ms));
  CHECK(dup.iqr_ms == doctest::Approx(once.iqr_ms));
}
