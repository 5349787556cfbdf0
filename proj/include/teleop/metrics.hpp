#ifndef TELEOP_METRICS_HPP
#define TELEOP_METRICS_HPP

#include "teleop/simulator.hpp"

#include <array>
#include <vector>

namespace teleop {

struct ErrorSeries {
  std::vector<JointVector> e;     // q_l - q_f per tick
  std::vector<JointVector> edot;  // qd_l - qd_f per tick
};

struct ErrorIndex {
  double epsilon = 0.0;
  double epsilon_dot = 0.0;
  std::array<double, kNumJoints> rms{};
  std::array<double, kNumJoints> rms_dot{};
};

/// Mean, population sigma, range and interpolated IQR, all in ms.
struct TimingStats {
  std::size_t n = 0;
  double mean_ms = 0.0;
  double sigma_ms = 0.0;
  double range_ms = 0.0;
  double iqr_ms = 0.0;
};

ErrorSeries error_series(const RunTrace& trace);

/// Per-joint RMS over the series; divides by the number of samples summed.
std::array<double, kNumJoints> rms_per_joint(const std::vector<JointVector>& series);

ErrorIndex error_index(const ErrorSeries& series);

/// Quantile with linear interpolation at position 1 + (n-1)p over the
/// sorted data. `sorted` must be ascending and nonempty.
double quantile_sorted(const std::vector<double>& sorted, double p);

TimingStats timing_stats(const std::vector<std::int64_t>& samples_us);

}  // namespace teleop

#endif  // TELEOP_METRICS_HPP
