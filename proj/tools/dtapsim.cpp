// Command-line front end: `run` executes one simulation, `sweep` fans a
// config out over seeds (and optionally algorithms and learning rates).

#include "dtap/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

std::string default_output_root() {
  const char* root = std::getenv("DTAP_OUTPUT_ROOT");
  return root && *root ? root : "runs";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DTAP multi-agent learning simulator"};
  app.require_subcommand(1);

  dtap::ConfigSource run_source;
  std::string run_preset, run_file, run_algorithm, run_out;
  std::uint64_t run_seed = 0;
  std::int64_t run_duration = 0;
  bool run_dump = false;
  std::vector<std::string> run_sets;

  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("--config", run_file, "key=value config file");
  run_cmd->add_option("--preset", run_preset, "paper-200k or paper-600k");
  run_cmd->add_option("--algorithm", run_algorithm, "wpl or giga-wolf");
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "master random seed");
  auto* duration_opt = run_cmd->add_option("--duration", run_duration, "time units to simulate");
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_flag("--dump-policies", run_dump, "also write policies.csv");
  run_cmd->add_option("--set", run_sets, "override any config key (key=value)");

  std::string sweep_file, sweep_preset, sweep_seeds, sweep_algorithms, sweep_etas, sweep_out;
  int sweep_parallel = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a config over a range of seeds");
  sweep_cmd->add_option("--config", sweep_file, "key=value config file");
  sweep_cmd->add_option("--preset", sweep_preset, "paper-200k or paper-600k");
  sweep_cmd->add_option("--seeds", sweep_seeds, "seed range A..B")->required();
  sweep_cmd->add_option("--parallel", sweep_parallel, "concurrent runs");
  sweep_cmd->add_option("--algorithms", sweep_algorithms, "comma list, e.g. wpl,giga-wolf");
  sweep_cmd->add_option("--etas", sweep_etas, "comma list of learning rates");
  sweep_cmd->add_option("--out", sweep_out, "sweep root directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*run_cmd) {
      if (!run_preset.empty()) run_source.preset = run_preset;
      if (!run_file.empty()) run_source.file = run_file;
      if (!run_algorithm.empty()) run_source.overrides.emplace_back("algorithm", run_algorithm);
      if (*seed_opt) run_source.overrides.emplace_back("seed", std::to_string(run_seed));
      if (*duration_opt) {
        run_source.overrides.emplace_back("duration", std::to_string(run_duration));
      }
      if (run_dump) run_source.overrides.emplace_back("dump_policies", "true");
      for (const auto& kv : run_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw dtap::ConfigError("set", "expected key=value: " + kv);
        run_source.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      auto config = dtap::load_config(run_source);
      if (!run_out.empty()) {
        config.output_dir = run_out;
      } else if (config.output_dir.empty()) {
        config.output_dir = default_output_root() + "/" +
                            std::string(dtap::to_string(config.algorithm)) + "_seed" +
                            std::to_string(config.seed);
      }
      const auto summary = dtap::run(config);
      std::cout << "output_dir=" << config.output_dir << '\n' << dtap::to_summary_text(summary);
      return 0;
    }

    dtap::ConfigSource source;
    if (!sweep_preset.empty()) source.preset = sweep_preset;
    if (!sweep_file.empty()) source.file = sweep_file;
    dtap::SweepSpec spec;
    spec.base = dtap::load_config(source);
    spec.seeds = dtap::parse_seed_range(sweep_seeds);
    for (const auto& a : split_list(sweep_algorithms)) {
      try {
        spec.algorithms.push_back(dtap::parse_algorithm(a));
      } catch (const std::invalid_argument& e) {
        throw dtap::ConfigError("algorithms", e.what());
      }
    }
    for (const auto& eta : split_list(sweep_etas)) {
      dtap::RunConfig probe = spec.base;
      dtap::apply_setting(probe, "eta", eta);
      dtap::validate(probe);
      spec.etas.push_back(probe.eta);
    }
    spec.parallel = sweep_parallel;
    spec.root = sweep_out.empty() ? default_output_root() + "/sweep" : sweep_out;
    const auto entries = dtap::sweep(spec);
    int failed = 0;
    for (const auto& e : entries) {
      std::cout << e.run_id << ' ' << (e.ok ? "ok" : "failed: " + e.error) << '\n';
      failed += e.ok ? 0 : 1;
    }
    std::cout << "index=" << (spec.root / "index.csv").string() << '\n';
    return failed == 0 ? 0 : kExitRuntimeError;
  } catch (const dtap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}
