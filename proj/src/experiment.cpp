#include "teleop/experiment.hpp"

#include "teleop/trace_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace teleop {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("spec: bad number '" + s + "' for " + key);
  }
}

JointVector parse_vec7(const std::string& value, const std::string& key) {
  const auto toks = split_ws(value);
  if (toks.size() == 1) {
    return JointVector::Constant(parse_real(toks[0], key));
  }
  if (toks.size() != static_cast<std::size_t>(kNumJoints)) {
    throw std::invalid_argument("spec: " + key + " needs 1 or 7 values");
  }
  JointVector v;
  for (int i = 0; i < kNumJoints; ++i) v[i] = parse_real(toks[i], key);
  return v;
}

DelaySampler parse_sampler(const std::string& value, const std::string& key) {
  const auto toks = split_ws(value);
  DelaySampler s;
  if (toks.size() == 2 && toks[0] == "constant") {
    s.family = DelaySampler::Family::Constant;
    s.shift_us = parse_real(toks[1], key);
    return s;
  }
  if (toks.size() == 4 && toks[0] == "gamma") {
    s.family = DelaySampler::Family::ShiftedGamma;
    s.shift_us = parse_real(toks[1], key);
    s.shape = parse_real(toks[2], key);
    s.scale_us = parse_real(toks[3], key);
    return s;
  }
  throw std::invalid_argument("spec: " + key +
                              " expects 'constant <shift_us>' or 'gamma <shift_us> <shape> <scale_us>'");
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("spec: " + key + " expects true/false");
}

}  // namespace

void ExperimentSpec::validate() const {
  if (conditions.empty()) throw std::invalid_argument("spec: no conditions defined");
  std::set<std::string> names;
  for (const auto& c : conditions) {
    if (!names.insert(c.name).second) {
      throw std::invalid_argument("spec: duplicate condition name " + c.name);
    }
  }
  if (repetitions < 1) throw std::invalid_argument("spec: repetitions must be >= 1");
  if (blocks < 1) throw std::invalid_argument("spec: blocks must be >= 1");
  ScenarioConfig probe = base;
  probe.validate();
}

ExperimentSpec parse_spec_text(const std::string& text) {
  ExperimentSpec spec;
  spec.raw_text = text;
  // Condition-scoped overrides are collected first, then resolved after
  // the condition list is known.
  std::map<std::string, std::map<std::string, std::string>> cond_keys;

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("spec line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "seed") {
      spec.master_seed = std::stoull(value);
    } else if (key == "repetitions") {
      spec.repetitions = static_cast<int>(parse_real(value, key));
    } else if (key == "blocks") {
      spec.blocks = static_cast<int>(parse_real(value, key));
    } else if (key == "duration_s") {
      spec.base.duration_us = static_cast<SimTime>(parse_real(value, key) * 1e6);
    } else if (key == "control_period_us") {
      spec.base.control_period_us = static_cast<SimTime>(parse_real(value, key));
    } else if (key == "comm_period_us") {
      spec.base.comm_period_us = static_cast<SimTime>(parse_real(value, key));
    } else if (key == "conditions") {
      for (const auto& name : split_ws(value)) {
        spec.conditions.push_back(Condition{name, TransportKind::Wired, std::nullopt});
      }
    } else if (key.rfind("condition.", 0) == 0) {
      const auto rest = key.substr(10);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) {
        throw std::invalid_argument("spec line " + std::to_string(lineno) +
                                    ": expected condition.<name>.<param>");
      }
      cond_keys[rest.substr(0, dot)][rest.substr(dot + 1)] = value;
    } else if (key == "trajectory.kind") {
      if (value == "sinusoidal") {
        spec.base.trajectory.kind = OperatorTrajectory::Kind::Sinusoidal;
      } else if (value == "waypoint") {
        spec.base.trajectory.kind = OperatorTrajectory::Kind::Waypoint;
      } else {
        throw std::invalid_argument("spec: unknown trajectory kind " + value);
      }
    } else if (key == "trajectory.amplitude") {
      spec.base.trajectory.amplitude = parse_vec7(value, key);
    } else if (key == "trajectory.frequency") {
      spec.base.trajectory.frequency = parse_vec7(value, key);
    } else if (key == "trajectory.phase") {
      spec.base.trajectory.phase = parse_vec7(value, key);
    } else if (key == "trajectory.randomize_phase") {
      spec.base.randomize_phase = parse_bool(value, key);
    } else if (key == "gains.p") {
      spec.base.gains.p = parse_vec7(value, key);
    } else if (key == "gains.d") {
      spec.base.gains.d = parse_vec7(value, key);
    } else if (key == "gains.k") {
      spec.base.gains.k = parse_real(value, key);
    } else if (key == "model.inertia") {
      spec.base.leader_model.inertia = parse_vec7(value, key);
      spec.base.follower_model.inertia = spec.base.leader_model.inertia;
    } else if (key == "model.damping") {
      spec.base.leader_model.damping = parse_vec7(value, key);
      spec.base.follower_model.damping = spec.base.leader_model.damping;
    } else if (key == "contact") {
      const auto toks = split_ws(value);
      if (toks.size() != 2 + kNumJoints) {
        throw std::invalid_argument("spec: contact expects start_s end_s and 7 torques");
      }
      ContactPhase phase;
      phase.start_us = static_cast<SimTime>(parse_real(toks[0], key) * 1e6);
      phase.end_us = static_cast<SimTime>(parse_real(toks[1], key) * 1e6);
      for (int i = 0; i < kNumJoints; ++i) {
        phase.torque[i] = parse_real(toks[2 + i], key);
      }
      spec.base.contacts.push_back(phase);
    } else {
      throw std::invalid_argument("spec line " + std::to_string(lineno) +
                                  ": unknown key " + key);
    }
  }

  for (auto& cond : spec.conditions) {
    auto it = cond_keys.find(cond.name);
    std::map<std::string, std::string> params;
    if (it != cond_keys.end()) params = it->second;
    cond_keys.erase(cond.name);

    const auto kind_it = params.find("transport");
    const std::string kind_name =
        kind_it != params.end() ? kind_it->second : cond.name;
    cond.transport = transport_kind_from_string(kind_name);
    if (kind_it != params.end()) params.erase(kind_it);

    if (!params.empty()) {
      TransportConfig tc = preset(cond.transport);
      for (const auto& [param, value] : params) {
        const std::string key = "condition." + cond.name + "." + param;
        if (param == "spike_prob") {
          tc.spike_prob = parse_real(value, key);
        } else if (param == "cycle_us") {
          tc.cycle_us = static_cast<std::int64_t>(parse_real(value, key));
        } else if (param == "send") {
          tc.send_overhead = parse_sampler(value, key);
        } else if (param == "recv") {
          tc.receive_path = parse_sampler(value, key);
        } else if (param == "spike") {
          tc.spike_delay = parse_sampler(value, key);
        } else if (param == "lag") {
          tc.sender_lag = parse_sampler(value, key);
        } else {
          throw std::invalid_argument("spec: unknown transport parameter " + key);
        }
      }
      tc.validate();
      cond.transport_override = tc;
    }
  }
  if (!cond_keys.empty()) {
    throw std::invalid_argument("spec: overrides for undeclared condition " +
                                cond_keys.begin()->first);
  }

  spec.validate();
  return spec;
}

ExperimentSpec parse_spec_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot read spec file: " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_spec_text(buf.str());
}

std::string RunId::stem() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s_b%02d_r%02d", condition.c_str(), block, rep);
  return buf;
}

namespace {

std::vector<RunId> enumerate_runs(const ExperimentSpec& spec) {
  std::vector<RunId> runs;
  for (const auto& cond : spec.conditions) {
    for (int b = 0; b < spec.blocks; ++b) {
      for (int r = 0; r < spec.repetitions; ++r) {
        RunId id;
        id.condition = cond.name;
        id.block = b;
        id.rep = r;
        // Seed shared across conditions: runs pair by (block, rep).
        id.seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(b),
                              static_cast<std::uint64_t>(r));
        runs.push_back(id);
      }
    }
  }
  return runs;
}

ScenarioConfig scenario_for(const ExperimentSpec& spec, const Condition& cond,
                            const RunId& id) {
  ScenarioConfig cfg = spec.base;
  cfg.name = id.stem();
  cfg.transport = cond.transport;
  cfg.transport_override = cond.transport_override;
  cfg.seed = id.seed;
  return cfg;
}

const Condition& find_condition(const ExperimentSpec& spec, const std::string& name) {
  for (const auto& c : spec.conditions) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("unknown condition: " + name);
}

struct RunsFileEntry {
  RunId id;
};

std::vector<RunsFileEntry> read_runs_csv(const fs::path& out_dir) {
  std::ifstream is(out_dir / "runs.csv", std::ios::binary);
  if (!is) {
    throw std::runtime_error("missing runs.csv in " + out_dir.string() +
                             " (run the 'run' stage first)");
  }
  std::string line;
  std::getline(is, line);  // header
  std::vector<RunsFileEntry> entries;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    RunsFileEntry e;
    std::string tok;
    std::getline(row, e.id.condition, ',');
    std::getline(row, tok, ',');
    e.id.block = std::stoi(tok);
    std::getline(row, tok, ',');
    e.id.rep = std::stoi(tok);
    std::getline(row, tok, ',');
    e.id.seed = std::stoull(tok);
    entries.push_back(e);
  }
  return entries;
}

}  // namespace

void update_manifest(const fs::path& out_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "manifest.csv") continue;
    files.push_back(fs::relative(entry.path(), out_dir));
  }
  std::sort(files.begin(), files.end());
  std::ofstream os(out_dir / "manifest.csv", std::ios::binary);
  os << "file,fnv1a64\n";
  for (const auto& rel : files) {
    os << rel.generic_string() << ',' << file_hash(out_dir / rel) << '\n';
  }
}

std::vector<std::string> run_experiment(const ExperimentSpec& spec,
                                        const fs::path& out_dir, int jobs) {
  spec.validate();
  fs::create_directories(out_dir);
  const std::vector<RunId> runs = enumerate_runs(spec);
  std::vector<std::string> errors(runs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      const RunId& id = runs[i];
      try {
        const ScenarioConfig cfg = scenario_for(spec, find_condition(spec, id.condition), id);
        const RunTrace trace = run_scenario(cfg);
        write_states_csv(trace, out_dir / (id.stem() + "_states.csv"));
        write_packets_csv(trace, out_dir / (id.stem() + "_packets.csv"));
      } catch (const std::exception& e) {
        errors[i] = id.stem() + ": " + e.what();
      }
    }
  };
  const int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  {
    std::ofstream os(out_dir / "runs.csv", std::ios::binary);
    os << "condition,block,rep,seed\n";
    for (const auto& id : runs) {
      os << id.condition << ',' << id.block << ',' << id.rep << ',' << id.seed << '\n';
    }
  }
  {
    std::ofstream os(out_dir / "spec_echo.txt", std::ios::binary);
    os << spec.raw_text;
  }
  update_manifest(out_dir);

  std::vector<std::string> failures;
  for (const auto& e : errors) {
    if (!e.empty()) failures.push_back(e);
  }
  return failures;
}

namespace {

double mean_ms(const std::vector<std::int64_t>& us) {
  if (us.empty()) return 0.0;
  double sum = 0.0;
  for (auto v : us) sum += static_cast<double>(v);
  return sum * 1e-3 / static_cast<double>(us.size());
}

void write_timing_table(const fs::path& path,
                        const std::vector<std::string>& conditions,
                        const std::map<std::string, TimingStats>& stats) {
  std::ofstream os(path, std::ios::binary);
  os << "stat";
  for (const auto& c : conditions) os << ',' << c;
  os << '\n';
  const char* rows[] = {"N", "mean_ms", "sigma_ms", "range_ms", "iqr_ms"};
  for (const char* row : rows) {
    os << row;
    for (const auto& c : conditions) {
      const TimingStats& st = stats.at(c);
      os << ',';
      if (std::string(row) == "N") {
        os << st.n;
      } else if (std::string(row) == "mean_ms") {
        os << format_double(st.mean_ms);
      } else if (std::string(row) == "sigma_ms") {
        os << format_double(st.sigma_ms);
      } else if (std::string(row) == "range_ms") {
        os << format_double(st.range_ms);
      } else {
        os << format_double(st.iqr_ms);
      }
    }
    os << '\n';
  }
}

}  // namespace

std::vector<std::string> compute_metrics(const fs::path& out_dir) {
  const auto runs = read_runs_csv(out_dir);
  std::vector<std::string> errors;
  std::vector<MetricsRow> rows;
  std::vector<std::string> condition_order;
  // Pooled per-condition delay samples, keyed (side, component).
  std::map<std::string, std::map<std::string, std::vector<std::int64_t>>> pooled;

  for (const auto& entry : runs) {
    const RunId& id = entry.id;
    if (std::find(condition_order.begin(), condition_order.end(), id.condition) ==
        condition_order.end()) {
      condition_order.push_back(id.condition);
    }
    try {
      const auto ticks = read_states_csv(out_dir / (id.stem() + "_states.csv"));
      const auto packets = read_packets_csv(out_dir / (id.stem() + "_packets.csv"));
      RunTrace trace;
      trace.ticks = ticks;
      MetricsRow row;
      row.id = id;
      row.index = error_index(error_series(trace));

      std::vector<std::int64_t> l2f_send, l2f_recv, f2l_send, f2l_recv;
      for (const auto& p : packets) {
        if (p.direction == Direction::LeaderToFollower) {
          l2f_send.push_back(p.t_send_us);
          l2f_recv.push_back(p.t_recv_us);
        } else {
          f2l_send.push_back(p.t_send_us);
          f2l_recv.push_back(p.t_recv_us);
        }
      }
      // Side attribution: the leader sends l2f and receives f2l.
      row.mean_t_send_leader_ms = mean_ms(l2f_send);
      row.mean_t_recv_leader_ms = mean_ms(f2l_recv);
      row.mean_t_send_follower_ms = mean_ms(f2l_send);
      row.mean_t_recv_follower_ms = mean_ms(l2f_recv);
      auto& cond = pooled[id.condition];
      auto append = [&](const char* key, const std::vector<std::int64_t>& v) {
        auto& dst = cond[key];
        dst.insert(dst.end(), v.begin(), v.end());
      };
      append("t_send_leader", l2f_send);
      append("t_recv_leader", f2l_recv);
      append("t_send_follower", f2l_send);
      append("t_recv_follower", l2f_recv);
      rows.push_back(row);
    } catch (const std::exception& e) {
      errors.push_back(id.stem() + ": " + e.what());
    }
  }

  {
    std::ofstream os(out_dir / "metrics.csv", std::ios::binary);
    os << "run_id,condition,block,rep,seed,epsilon,epsilon_dot";
    for (int i = 0; i < kNumJoints; ++i) os << ",rms_" << i;
    for (int i = 0; i < kNumJoints; ++i) os << ",rms_dot_" << i;
    os << ",mean_t_send_leader_ms,mean_t_recv_leader_ms,mean_t_send_follower_ms,mean_t_recv_follower_ms\n";
    for (const auto& row : rows) {
      os << row.id.stem() << ',' << row.id.condition << ',' << row.id.block << ','
         << row.id.rep << ',' << row.id.seed << ',' << format_double(row.index.epsilon)
         << ',' << format_double(row.index.epsilon_dot);
      for (int i = 0; i < kNumJoints; ++i) os << ',' << format_double(row.index.rms[i]);
      for (int i = 0; i < kNumJoints; ++i) os << ',' << format_double(row.index.rms_dot[i]);
      os << ',' << format_double(row.mean_t_send_leader_ms) << ','
         << format_double(row.mean_t_recv_leader_ms) << ','
         << format_double(row.mean_t_send_follower_ms) << ','
         << format_double(row.mean_t_recv_follower_ms) << '\n';
    }
  }

  for (const char* key : {"t_send_leader", "t_recv_leader", "t_send_follower",
                          "t_recv_follower"}) {
    std::map<std::string, TimingStats> per_cond;
    for (const auto& cond : condition_order) {
      auto it = pooled.find(cond);
      if (it == pooled.end() || it->second[key].empty()) {
        per_cond[cond] = TimingStats{};
      } else {
        per_cond[cond] = timing_stats(it->second[key]);
      }
    }
    write_timing_table(out_dir / ("timing_" + std::string(key) + ".csv"),
                       condition_order, per_cond);
  }

  update_manifest(out_dir);
  return errors;
}

std::vector<MetricsRow> read_metrics_csv(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open metrics file: " + path.string());
  std::string line;
  std::getline(is, line);
  std::vector<MetricsRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tok;
    MetricsRow m;
    std::getline(row, tok, ',');  // run_id, reconstructed from parts
    std::getline(row, m.id.condition, ',');
    std::getline(row, tok, ',');
    m.id.block = std::stoi(tok);
    std::getline(row, tok, ',');
    m.id.rep = std::stoi(tok);
    std::getline(row, tok, ',');
    m.id.seed = std::stoull(tok);
    std::getline(row, tok, ',');
    m.index.epsilon = std::strtod(tok.c_str(), nullptr);
    std::getline(row, tok, ',');
    m.index.epsilon_dot = std::strtod(tok.c_str(), nullptr);
    for (int i = 0; i < kNumJoints; ++i) {
      std::getline(row, tok, ',');
      m.index.rms[i] = std::strtod(tok.c_str(), nullptr);
    }
    for (int i = 0; i < kNumJoints; ++i) {
      std::getline(row, tok, ',');
      m.index.rms_dot[i] = std::strtod(tok.c_str(), nullptr);
    }
    std::getline(row, tok, ',');
    m.mean_t_send_leader_ms = std::strtod(tok.c_str(), nullptr);
    std::getline(row, tok, ',');
    m.mean_t_recv_leader_ms = std::strtod(tok.c_str(), nullptr);
    std::getline(row, tok, ',');
    m.mean_t_send_follower_ms = std::strtod(tok.c_str(), nullptr);
    std::getline(row, tok, ',');
    m.mean_t_recv_follower_ms = std::strtod(tok.c_str(), nullptr);
    rows.push_back(m);
  }
  return rows;
}

namespace {

PairedData paired_metric(const std::vector<MetricsRow>& rows,
                         const std::vector<std::string>& conditions,
                         double MetricsRow::*scalar) {
  PairedData data;
  data.conditions = conditions;
  std::map<std::pair<int, int>, std::map<std::string, double>> cells;
  for (const auto& row : rows) {
    cells[{row.id.block, row.id.rep}][row.id.condition] = row.*scalar;
  }
  for (const auto& [key, per_cond] : cells) {
    std::vector<double> block;
    for (const auto& cond : conditions) {
      auto it = per_cond.find(cond);
      if (it == per_cond.end()) {
        throw std::runtime_error("metrics not rectangular: missing condition '" +
                                 cond + "' for block " + std::to_string(key.first) +
                                 " rep " + std::to_string(key.second));
      }
      block.push_back(it->second);
    }
    data.blocks.push_back(std::move(block));
  }
  return data;
}

PairedData paired_epsilon(const std::vector<MetricsRow>& rows,
                          const std::vector<std::string>& conditions, bool dot) {
  PairedData data;
  data.conditions = conditions;
  std::map<std::pair<int, int>, std::map<std::string, double>> cells;
  for (const auto& row : rows) {
    cells[{row.id.block, row.id.rep}][row.id.condition] =
        dot ? row.index.epsilon_dot : row.index.epsilon;
  }
  for (const auto& [key, per_cond] : cells) {
    std::vector<double> block;
    for (const auto& cond : conditions) {
      auto it = per_cond.find(cond);
      if (it == per_cond.end()) {
        throw std::runtime_error("metrics not rectangular: missing condition '" +
                                 cond + "' for block " + std::to_string(key.first) +
                                 " rep " + std::to_string(key.second));
      }
      block.push_back(it->second);
    }
    data.blocks.push_back(std::move(block));
  }
  return data;
}

void append_report_rows(std::ostream& csv, std::ostream& txt,
                        const ComparisonReport& report) {
  char buf[256];
  auto emit = [&](const std::string& test, const std::string& a,
                  const std::string& b, const TestResult& r) {
    csv << report.metric << ',' << test << ',' << a << ',' << b << ','
        << format_double(r.statistic) << ',' << format_double(r.p_value) << ','
        << r.n << ',' << format_double(r.alpha_used) << ','
        << (r.significant ? "true" : "false") << '\n';
    std::snprintf(buf, sizeof(buf), "  %-22s %-10s %-10s stat=%9.4f  p=%.5f  %s\n",
                  test.c_str(), a.c_str(), b.c_str(), r.statistic, r.p_value,
                  r.significant ? "SIGNIFICANT" : "n.s.");
    txt << buf;
  };
  txt << "metric: " << report.metric << "  (alpha=" << format_double(report.alpha_family);
  std::snprintf(buf, sizeof(buf), ", per-comparison threshold %.4f)\n",
                report.alpha_pairwise);
  txt << buf;
  for (const auto& [cond, ks] : report.normality) emit(ks.test, cond, "-", ks);
  emit(report.friedman_result.test, "all", "-", report.friedman_result);
  for (const auto& pw : report.pairwise) {
    emit(pw.result.test, pw.condition_a, pw.condition_b, pw.result);
  }
  txt << '\n';
}

}  // namespace

std::vector<ComparisonReport> compute_stats(const fs::path& out_dir, double alpha) {
  const auto rows = read_metrics_csv(out_dir / "metrics.csv");
  if (rows.empty()) throw std::runtime_error("metrics.csv has no rows");
  std::vector<std::string> conditions;
  for (const auto& row : rows) {
    if (std::find(conditions.begin(), conditions.end(), row.id.condition) ==
        conditions.end()) {
      conditions.push_back(row.id.condition);
    }
  }
  if (conditions.size() < 2) {
    throw std::runtime_error("stats needs at least 2 conditions");
  }

  struct MetricDef {
    const char* name;
    PairedData data;
  };
  std::vector<MetricDef> defs;
  defs.push_back({"epsilon", paired_epsilon(rows, conditions, false)});
  defs.push_back({"epsilon_dot", paired_epsilon(rows, conditions, true)});
  defs.push_back({"t_send", paired_metric(rows, conditions,
                                          &MetricsRow::mean_t_send_leader_ms)});
  defs.push_back({"t_recv", paired_metric(rows, conditions,
                                          &MetricsRow::mean_t_recv_leader_ms)});

  std::ofstream csv(out_dir / "stats_report.csv", std::ios::binary);
  std::ofstream txt(out_dir / "stats_report.txt", std::ios::binary);
  csv << "metric,test,condition_a,condition_b,statistic,p,n,alpha_used,significant\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "Comparison battery: KS normality, Friedman, pairwise Wilcoxon\n"
                "family alpha %.4f, per-comparison threshold %.4f\n\n",
                alpha, bonferroni(alpha, static_cast<int>(conditions.size() *
                                                          (conditions.size() - 1) / 2)));
  txt << buf;

  std::vector<ComparisonReport> reports;
  for (auto& def : defs) {
    ComparisonReport report = compare_conditions(def.data, alpha);
    report.metric = def.name;
    append_report_rows(csv, txt, report);
    reports.push_back(std::move(report));
  }
  update_manifest(out_dir);
  return reports;
}

void plot_data(const fs::path& out_dir) {
  const auto rows = read_metrics_csv(out_dir / "metrics.csv");
  std::vector<std::string> conditions;
  std::map<std::string, std::vector<double>> eps, eps_dot;
  for (const auto& row : rows) {
    if (!eps.count(row.id.condition)) conditions.push_back(row.id.condition);
    eps[row.id.condition].push_back(row.index.epsilon);
    eps_dot[row.id.condition].push_back(row.index.epsilon_dot);
  }

  auto write_box = [&](const fs::path& path, std::map<std::string, std::vector<double>>& data) {
    std::ofstream os(path, std::ios::binary);
    os << "condition,min,q1,median,q3,max\n";
    for (const auto& cond : conditions) {
      auto& v = data[cond];
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      os << cond << ',' << format_double(v.front()) << ','
         << format_double(quantile_sorted(v, 0.25)) << ','
         << format_double(quantile_sorted(v, 0.5)) << ','
         << format_double(quantile_sorted(v, 0.75)) << ','
         << format_double(v.back()) << '\n';
    }
  };
  write_box(out_dir / "boxplot_epsilon.csv", eps);
  write_box(out_dir / "boxplot_epsilon_dot.csv", eps_dot);

  // Fixed log-spaced bins for the delay histograms: 0.001 ms .. 10 s.
  constexpr int kBins = 56;
  const double lo_exp = -3.0, hi_exp = 4.0;
  const auto runs = read_runs_csv(out_dir);
  std::map<std::string, std::vector<std::int64_t>> send_us, recv_us;
  for (const auto& entry : runs) {
    try {
      const auto packets = read_packets_csv(out_dir / (entry.id.stem() + "_packets.csv"));
      for (const auto& p : packets) {
        if (p.direction == Direction::LeaderToFollower) {
          send_us[entry.id.condition].push_back(p.t_send_us);
        } else {
          recv_us[entry.id.condition].push_back(p.t_recv_us);
        }
      }
    } catch (const std::exception&) {
      continue;  // the per-figure warning case: skip missing traces
    }
  }
  auto write_hist = [&](const std::string& prefix,
                        std::map<std::string, std::vector<std::int64_t>>& data) {
    for (const auto& cond : conditions) {
      std::ofstream os(out_dir / (prefix + "_" + cond + ".csv"), std::ios::binary);
      os << "bin_lo_ms,bin_hi_ms,count\n";
      std::vector<std::size_t> counts(kBins, 0);
      for (auto us : data[cond]) {
        const double ms = static_cast<double>(us) * 1e-3;
        double pos = ms > 0.0 ? (std::log10(ms) - lo_exp) / (hi_exp - lo_exp) * kBins
                              : 0.0;
        int bin = static_cast<int>(std::floor(pos));
        bin = std::clamp(bin, 0, kBins - 1);  // under/overflow into end bins
        counts[static_cast<std::size_t>(bin)]++;
      }
      for (int b = 0; b < kBins; ++b) {
        const double lo = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * b / kBins);
        const double hi = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * (b + 1) / kBins);
        os << format_double(lo) << ',' << format_double(hi) << ',' << counts[b] << '\n';
      }
    }
  };
  write_hist("hist_t_send_leader", send_us);
  write_hist("hist_t_recv_leader", recv_us);
  update_manifest(out_dir);
}

}  // namespace teleop
