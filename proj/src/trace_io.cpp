#include "teleop/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace teleop {

std::string format_double(double v) {
  char buf[64];
  // %.17g round-trips any double; try shorter forms first for readability.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

namespace {

void append_vec(std::ostream& os, const JointVector& v) {
  for (int i = 0; i < kNumJoints; ++i) os << ',' << format_double(v[i]);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);  // LF line endings everywhere
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  return os;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

void write_states_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "t_us";
  const char* groups[] = {"q_l", "qd_l", "q_f", "qd_f", "tau_l", "tau_f"};
  for (const char* g : groups) {
    for (int i = 0; i < kNumJoints; ++i) os << ',' << g << '_' << i;
  }
  os << '\n';
  for (const auto& tick : trace.ticks) {
    os << tick.t_us;
    append_vec(os, tick.q_l);
    append_vec(os, tick.qd_l);
    append_vec(os, tick.q_f);
    append_vec(os, tick.qd_f);
    append_vec(os, tick.tau_l);
    append_vec(os, tick.tau_f);
    os << '\n';
  }
}

void write_packets_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "direction,seq,sent_at_us,t_send_us,t_recv_us,deliver_at_us\n";
  for (const auto& p : trace.packets) {
    os << to_string(p.direction) << ',' << p.seq << ',' << p.sent_at_us << ','
       << p.t_send_us << ',' << p.t_recv_us << ',' << p.deliver_at_us << '\n';
  }
}

std::vector<TickSample> read_states_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty states file: " + path.string());
  std::vector<TickSample> ticks;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto parts = split_csv(line);
    if (parts.size() != 1 + 6 * kNumJoints) {
      throw std::runtime_error("malformed states row in " + path.string());
    }
    TickSample t;
    t.t_us = std::stoll(parts[0]);
    JointVector* vecs[] = {&t.q_l, &t.qd_l, &t.q_f, &t.qd_f, &t.tau_l, &t.tau_f};
    std::size_t idx = 1;
    for (JointVector* v : vecs) {
      for (int i = 0; i < kNumJoints; ++i) (*v)[i] = std::strtod(parts[idx++].c_str(), nullptr);
    }
    ticks.push_back(t);
  }
  return ticks;
}

std::vector<PacketRecord> read_packets_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty packets file: " + path.string());
  std::vector<PacketRecord> packets;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto parts = split_csv(line);
    if (parts.size() != 6) {
      throw std::runtime_error("malformed packets row in " + path.string());
    }
    PacketRecord p;
    p.direction = parts[0] == "l2f" ? Direction::LeaderToFollower
                                    : Direction::FollowerToLeader;
    p.seq = std::stoull(parts[1]);
    p.sent_at_us = std::stoll(parts[2]);
    p.t_send_us = std::stoll(parts[3]);
    p.t_recv_us = std::stoll(parts[4]);
    p.deliver_at_us = std::stoll(parts[5]);
    packets.push_back(p);
  }
  return packets;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for hashing: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016" PRIx64, h);
  return out;
}

}  // namespace teleop
