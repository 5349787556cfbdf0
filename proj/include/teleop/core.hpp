#ifndef TELEOP_CORE_HPP
#define TELEOP_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace teleop {

inline constexpr int kNumJoints = 7;

template <typename Scalar>
using JointVec = Eigen::Matrix<Scalar, kNumJoints, 1>;

/// 7-element joint-space vector: angles (rad), velocities (rad/s) or
/// torques (N*m) depending on context.
using JointVector = JointVec<double>;

/// Simulation time in integer microseconds since run start. The 1 kHz
/// control tick (1000 us) and the 50 ms comm cycle (50000 us) are exactly
/// representable, so schedules never drift.
using SimTime = std::int64_t;

inline constexpr SimTime kControlPeriodUs = 1000;
inline constexpr SimTime kCommPeriodUs = 50000;

/// Validating constructor for JointVector. Rejects non-finite elements.
JointVector make_joint_vector(const double* values, std::size_t count);
JointVector make_joint_vector(std::initializer_list<double> values);

/// Throws std::invalid_argument naming the first non-finite index.
void check_finite(const JointVector& v, const char* what);

enum class Direction { LeaderToFollower, FollowerToLeader };

const char* to_string(Direction d);

/// One comm-loop payload. Leader->follower carries (q, qdot); the reverse
/// direction carries the external-torque estimate only.
struct ControlPacket {
  std::uint64_t seq = 0;
  SimTime sent_at = 0;
  Direction direction = Direction::LeaderToFollower;
  JointVector q = JointVector::Zero();      // L->F only
  JointVector qdot = JointVector::Zero();   // L->F only
  JointVector tau_ext = JointVector::Zero(); // F->L only
};

/// Counter-based deterministic RNG stream. Identical (seed, stream_id)
/// reproduces the identical sample sequence on any platform; distinct
/// stream ids decorrelate components so adding one never perturbs another.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1).
  double next_uniform();

  /// Standard normal via Box-Muller (two uniforms per draw).
  double next_normal();

  /// Gamma(shape, scale) via Marsaglia-Tsang squeeze.
  double next_gamma(double shape, double scale);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
};

/// splitmix64 finalizer; also used for seed derivation and manifest-free
/// hashing of (seed, index) tuples.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic combination of a seed with an index (run derivation).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace teleop

#endif  // TELEOP_CORE_HPP
