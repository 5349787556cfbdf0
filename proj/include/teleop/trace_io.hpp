#ifndef TELEOP_TRACE_IO_HPP
#define TELEOP_TRACE_IO_HPP

#include "teleop/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace teleop {

/// Shortest round-trip formatting for doubles; CSV output is byte-stable
/// under reruns and reads back bit-exact.
std::string format_double(double v);

/// States CSV: t_us, q_l_0..6, qd_l_0..6, q_f_0..6, qd_f_0..6,
/// tau_l_0..6, tau_f_0..6.
void write_states_csv(const RunTrace& trace, const std::filesystem::path& path);

/// Packets CSV: direction, seq, sent_at_us, t_send_us, t_recv_us,
/// deliver_at_us.
void write_packets_csv(const RunTrace& trace, const std::filesystem::path& path);

std::vector<TickSample> read_states_csv(const std::filesystem::path& path);
std::vector<PacketRecord> read_packets_csv(const std::filesystem::path& path);

/// FNV-1a 64-bit over the file bytes, as a 16-digit hex string.
std::string file_hash(const std::filesystem::path& path);

}  // namespace teleop

#endif  // TELEOP_TRACE_IO_HPP
