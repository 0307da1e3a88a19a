#ifndef DTAP_RUNNER_HPP
#define DTAP_RUNNER_HPP

#include "dtap/config.hpp"
#include "dtap/metrics.hpp"
#include "dtap/world.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dtap {

struct RunSummary {
  double final_window_atst = 0;
  double final_entropy_mean = 0;
  double peak_atst = 0;
  std::uint64_t total_tasks = 0;  // tasks generated over the run
  std::uint64_t completed_tasks = 0;
  std::size_t frames = 0;
  TailStats tail;
};

RunSummary summarize(std::span<const MetricsFrame> frames, std::int64_t tail_span,
                     std::uint64_t total_tasks);
std::string to_summary_text(const RunSummary& summary);

SimConfig make_sim_config(const RunConfig& config, const GridTopology& topology);

struct SimulationHooks {
  std::function<void(const MetricsFrame&)> on_frame;
  /// Called after frames whose window index is a multiple of policy_dump_every
  /// when dump_policies is set.
  std::function<void(std::int64_t, std::span<const Policy>)> on_policies;
  /// Called after every tick; lets tests audit the world.
  std::function<void(const World&)> on_tick;
  std::function<void(const Task&)> on_completion;
};

struct SimulationResult {
  std::vector<MetricsFrame> frames;
  Census census;  // at the end of the run
};

/// Runs the configured simulation in memory. Throws ConfigError for an
/// invalid config.
SimulationResult simulate(const RunConfig& config, const SimulationHooks& hooks = {});

/// Runs and writes config.txt, metrics.csv, summary.txt (and policies.csv
/// when enabled) into config.output_dir.
RunSummary run(const RunConfig& config);

struct SweepSpec {
  RunConfig base;
  std::vector<std::uint64_t> seeds;
  std::vector<Algorithm> algorithms;  // empty: base.algorithm only
  std::vector<double> etas;           // empty: base.eta only
  int parallel = 1;
  std::filesystem::path root;
};

struct SweepEntry {
  std::string run_id;
  RunConfig config;
  bool ok = false;
  std::string error;
  RunSummary summary;
};

/// Expands the sweep into runs (algorithm x eta x seed), one output
/// subdirectory each, executes them on up to `parallel` threads and writes
/// index.csv under root. Failed runs are recorded, not fatal.
std::vector<SweepEntry> sweep(const SweepSpec& spec);

std::vector<SweepEntry> expand_sweep(const SweepSpec& spec);

/// "A..B" inclusive, or a single number.
std::vector<std::uint64_t> parse_seed_range(std::string_view text);

}  // namespace dtap

#endif  // DTAP_RUNNER_HPP
