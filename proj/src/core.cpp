#include "teleop/core.hpp"

#include <cmath>

namespace teleop {

JointVector make_joint_vector(const double* values, std::size_t count) {
  if (count != static_cast<std::size_t>(kNumJoints)) {
    throw std::invalid_argument("JointVector requires exactly 7 elements, got " +
                                std::to_string(count));
  }
  JointVector v;
  for (int i = 0; i < kNumJoints; ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("JointVector element " + std::to_string(i) +
                                  " is not finite");
    }
    v[i] = values[i];
  }
  return v;
}

JointVector make_joint_vector(std::initializer_list<double> values) {
  return make_joint_vector(values.begin(), values.size());
}

void check_finite(const JointVector& v, const char* what) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!std::isfinite(v[i])) {
      throw std::invalid_argument(std::string(what) + ": element " +
                                  std::to_string(i) + " is not finite");
    }
  }
}

const char* to_string(Direction d) {
  return d == Direction::LeaderToFollower ? "l2f" : "f2l";
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(master ^ mix64(a)) ^ mix64(b + 0x517cc1b727220a95ULL));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      state_(derive_seed(seed, stream_id, 0xa0761d6478bd642fULL)) {}

std::uint64_t RngStream::next_u64() {
  // splitmix64: full-period counter generator, trivially reproducible.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RngStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  // Box-Muller, no caching so the draw count per sample is fixed.
  double u1 = next_uniform();
  double u2 = next_uniform();
  while (u1 <= 0.0) u1 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RngStream::next_gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0) {
    throw std::invalid_argument("gamma sampler requires positive shape and scale");
  }
  if (shape < 1.0) {
    double u = next_uniform();
    while (u <= 0.0) u = next_uniform();
    return next_gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = next_normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v * scale;
    }
  }
}

}  // namespace teleop
