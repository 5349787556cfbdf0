#include "teleop/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace teleop {

ErrorSeries error_series(const RunTrace& trace) {
  ErrorSeries s;
  s.e.reserve(trace.ticks.size());
  s.edot.reserve(trace.ticks.size());
  for (const auto& tick : trace.ticks) {
    s.e.push_back(tick.q_l - tick.q_f);
    s.edot.push_back(tick.qd_l - tick.qd_f);
  }
  return s;
}

std::array<double, kNumJoints> rms_per_joint(const std::vector<JointVector>& series) {
  if (series.empty()) {
    throw std::invalid_argument("rms_per_joint: empty series");
  }
  std::array<double, kNumJoints> out{};
  for (const auto& v : series) {
    for (int i = 0; i < kNumJoints; ++i) out[i] += v[i] * v[i];
  }
  const double inv_t = 1.0 / static_cast<double>(series.size());
  for (int i = 0; i < kNumJoints; ++i) out[i] = std::sqrt(out[i] * inv_t);
  return out;
}

ErrorIndex error_index(const ErrorSeries& series) {
  ErrorIndex idx;
  idx.rms = rms_per_joint(series.e);
  idx.rms_dot = rms_per_joint(series.edot);
  for (int i = 0; i < kNumJoints; ++i) {
    idx.epsilon += idx.rms[i];
    idx.epsilon_dot += idx.rms_dot[i];
  }
  return idx;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double pos = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

TimingStats timing_stats(const std::vector<std::int64_t>& samples_us) {
  if (samples_us.empty()) {
    throw std::invalid_argument("timing_stats: empty sample set");
  }
  TimingStats st;
  st.n = samples_us.size();
  std::vector<double> ms(samples_us.size());
  std::transform(samples_us.begin(), samples_us.end(), ms.begin(),
                 [](std::int64_t us) { return static_cast<double>(us) * 1e-3; });
  double sum = 0.0;
  for (double x : ms) sum += x;
  st.mean_ms = sum / static_cast<double>(st.n);
  double ss = 0.0;
  for (double x : ms) ss += (x - st.mean_ms) * (x - st.mean_ms);
  st.sigma_ms = std::sqrt(ss / static_cast<double>(st.n));  // population sigma
  std::sort(ms.begin(), ms.end());
  st.range_ms = ms.back() - ms.front();
  st.iqr_ms = quantile_sorted(ms, 0.75) - quantile_sorted(ms, 0.25);
  return st;
}

}  // namespace teleop
