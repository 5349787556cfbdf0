#include "teleop/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;
constexpr int kExitAnalysis = 3;

struct Options {
  std::string spec_path;
  std::string out_dir = "out";
  double alpha = 0.05;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

teleop::ExperimentSpec load_spec(const Options& opt) {
  teleop::ExperimentSpec spec = teleop::parse_spec_file(opt.spec_path);
  if (opt.seed) spec.master_seed = *opt.seed;
  return spec;
}

int do_run(const Options& opt) {
  const auto spec = load_spec(opt);
  const auto failures = teleop::run_experiment(spec, opt.out_dir, opt.jobs);
  for (const auto& f : failures) std::cerr << "run failed: " << f << '\n';
  std::cout << "wrote traces to " << opt.out_dir << '\n';
  return failures.empty() ? kExitOk : kExitPartial;
}

int do_metrics(const Options& opt) {
  const auto errors = teleop::compute_metrics(opt.out_dir);
  for (const auto& e : errors) std::cerr << "metrics error: " << e << '\n';
  std::cout << "wrote metrics to " << opt.out_dir << '\n';
  return errors.empty() ? kExitOk : kExitPartial;
}

int do_stats(const Options& opt) {
  teleop::compute_stats(opt.out_dir, opt.alpha);
  std::cout << "wrote stats report to " << opt.out_dir << '\n';
  return kExitOk;
}

int do_plotdata(const Options& opt) {
  teleop::plot_data(opt.out_dir);
  std::cout << "wrote plot data to " << opt.out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic leader-follower teleoperation benchmark"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  app.add_option("--alpha", opt.alpha, "Family-wise significance level")
      ->capture_default_str();
  app.add_option("--jobs", opt.jobs, "Parallel simulation workers")
      ->capture_default_str();
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the master seed");

  auto* run = app.add_subcommand("run", "Execute the experiment batch");
  run->add_option("--spec", opt.spec_path, "Experiment spec file")->required();
  auto* metrics = app.add_subcommand("metrics", "Compute error indices and timing stats");
  auto* stats = app.add_subcommand("stats", "Run the statistical battery");
  auto* plotdata = app.add_subcommand("plotdata", "Emit boxplot/histogram CSVs");
  auto* all = app.add_subcommand("all", "run + metrics + stats + plotdata");
  all->add_option("--spec", opt.spec_path, "Experiment spec file")->required();
  // Shared options (--out, --jobs, ...) may appear after the subcommand name.
  for (auto* sub : {run, metrics, stats, plotdata, all}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) opt.seed = seed_value;

  try {
    if (run->parsed()) return do_run(opt);
    if (metrics->parsed()) return do_metrics(opt);
    if (stats->parsed()) return do_stats(opt);
    if (plotdata->parsed()) return do_plotdata(opt);
    if (all->parsed()) {
      const int rc = do_run(opt);
      if (rc != kExitOk) return rc;
      int rc2 = do_metrics(opt);
      if (rc2 != kExitOk) return rc2;
      do_stats(opt);
      do_plotdata(opt);
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
  return kExitUsage;
}
