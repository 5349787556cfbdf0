#ifndef TELEOP_EXPERIMENT_HPP
#define TELEOP_EXPERIMENT_HPP

#include "teleop/metrics.hpp"
#include "teleop/simulator.hpp"
#include "teleop/stats.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace teleop {

/// Named experiment condition: a transport choice plus optional preset
/// parameter overrides on top of the shared base scenario.
struct Condition {
  std::string name;
  TransportKind transport = TransportKind::Wired;
  std::optional<TransportConfig> transport_override;
};

/// Parsed experiment spec: flat `key = value` file, `#` comments, dotted
/// section paths. See specs/paper-replica.spec for the schema in use.
struct ExperimentSpec {
  std::vector<Condition> conditions;
  ScenarioConfig base;       // shared scenario settings (transport ignored)
  int repetitions = 3;
  int blocks = 1;            // pseudo-operators; runs per condition = blocks * repetitions
  std::uint64_t master_seed = 0;
  std::string raw_text;      // echoed into the manifest

  void validate() const;
};

ExperimentSpec parse_spec_file(const std::filesystem::path& path);
ExperimentSpec parse_spec_text(const std::string& text);

struct RunId {
  std::string condition;
  int block = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  std::string stem() const;  // "<condition>_b<block>_r<rep>"
};

/// Per-run metric row as written to metrics.csv.
struct MetricsRow {
  RunId id;
  ErrorIndex index;
  double mean_t_send_leader_ms = 0.0;
  double mean_t_recv_leader_ms = 0.0;
  double mean_t_send_follower_ms = 0.0;
  double mean_t_recv_follower_ms = 0.0;
};

/// Runs every (condition, block, rep) combination, writes the trace CSV
/// pair per run plus manifest.csv. Returns per-run error messages (empty
/// string = success). Seeds derive from (master, block, rep) only, so runs
/// pair across conditions.
std::vector<std::string> run_experiment(const ExperimentSpec& spec,
                                        const std::filesystem::path& out_dir,
                                        int jobs = 1);

/// Reads traces listed in the manifest, writes metrics.csv and the four
/// timing-stats tables. Throws on a missing manifest; per-file read errors
/// are reported in the return value and skipped.
std::vector<std::string> compute_metrics(const std::filesystem::path& out_dir);

/// Reads metrics.csv, runs the comparison battery for epsilon, epsilon_dot
/// and the per-run mean leader-side t_send / t_recv, writes
/// stats_report.csv and stats_report.txt.
std::vector<ComparisonReport> compute_stats(const std::filesystem::path& out_dir,
                                            double alpha = 0.05);

/// Writes boxplot five-number summaries for epsilon / epsilon_dot and
/// per-condition log-binned delay histograms.
void plot_data(const std::filesystem::path& out_dir);

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

/// Rebuilds the manifest: every file under out_dir except the manifest
/// itself, sorted by path, with content hashes.
void update_manifest(const std::filesystem::path& out_dir);

}  // namespace teleop

#endif  // TELEOP_EXPERIMENT_HPP
