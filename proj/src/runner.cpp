#include "dtap/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace dtap {

namespace fs = std::filesystem;

namespace {

std::string field(double value) {
  return std::isfinite(value) ? format_double(value) : std::string();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

RunSummary summarize(std::span<const MetricsFrame> frames, std::int64_t tail_span,
                     std::uint64_t total_tasks) {
  RunSummary s;
  s.total_tasks = total_tasks;
  s.frames = frames.size();
  s.final_window_atst = std::numeric_limits<double>::quiet_NaN();
  s.peak_atst = std::numeric_limits<double>::quiet_NaN();
  if (frames.empty()) return s;
  s.final_window_atst = frames.back().window_tasks > 0 ? frames.back().atst
                                                       : std::numeric_limits<double>::quiet_NaN();
  s.final_entropy_mean = frames.back().entropy_mean;
  s.completed_tasks = frames.back().tasks_completed_total;
  for (const auto& f : frames) {
    if (f.window_tasks == 0) continue;
    if (!(s.peak_atst >= f.atst)) s.peak_atst = f.atst;
  }
  s.tail = tail_stats(frames, tail_span);
  return s;
}

std::string to_summary_text(const RunSummary& s) {
  std::ostringstream out;
  out << "final_window_atst=" << field(s.final_window_atst) << '\n'
      << "final_entropy_mean=" << field(s.final_entropy_mean) << '\n'
      << "peak_atst=" << field(s.peak_atst) << '\n'
      << "total_tasks=" << s.total_tasks << '\n'
      << "completed_tasks=" << s.completed_tasks << '\n'
      << "frames=" << s.frames << '\n'
      << "tail_span=" << s.tail.span << '\n'
      << "tail_atst_mean=" << field(s.tail.atst_mean) << '\n'
      << "tail_atst_relative_change=" << field(s.tail.atst_relative_change) << '\n'
      << "tail_entropy_change=" << field(s.tail.entropy_change) << '\n'
      << "tail_entropy_slope=" << field(s.tail.entropy_slope) << '\n';
  return out.str();
}

SimConfig make_sim_config(const RunConfig& config, const GridTopology& topology) {
  SimConfig sim;
  sim.generators = topology.center_region(config.generator_rows, config.generator_cols);
  sim.arrival_rate = config.arrival_rate;
  sim.service_rate = config.service_rate;
  sim.learner.algorithm = config.algorithm;
  sim.learner.eta = config.eta;
  sim.learner.alpha = config.alpha;
  sim.learner.epsilon_floor = config.epsilon_floor;
  sim.seed = config.seed;
  sim.max_hops = config.max_hops;
  return sim;
}

SimulationResult simulate(const RunConfig& config, const SimulationHooks& hooks) {
  validate(config);
  auto topology = build_grid(config.grid_rows, config.grid_cols, config.adjacent_delay);
  World world(topology, make_sim_config(config, topology));

  WindowAccumulator windows(config.window);
  world.on_completion([&](const Task& task) {
    windows.record_completion(task_tst(task), task.completion_time);
    if (hooks.on_completion) hooks.on_completion(task);
  });

  SimulationResult result;
  result.frames.reserve(static_cast<std::size_t>(config.duration / config.window));
  std::vector<Policy> policies;
  policies.reserve(static_cast<std::size_t>(topology.size()));

  for (Tick t = 1; t <= config.duration; ++t) {
    world.step();
    if (hooks.on_tick) hooks.on_tick(world);
    if (t % config.window != 0) continue;

    policies.clear();
    for (AgentId id = 0; id < topology.size(); ++id) policies.push_back(world.policy(id));
    const auto k = t / config.window;
    const auto frame = windows.close_window(k, entropy_snapshot(std::span<const Policy>(policies)));
    result.frames.push_back(frame);
    if (hooks.on_frame) hooks.on_frame(frame);
    if (config.dump_policies && hooks.on_policies && k % config.policy_dump_every == 0) {
      hooks.on_policies(t, policies);
    }
  }
  result.census = world.census();
  return result;
}

RunSummary run(const RunConfig& config) {
  validate(config);
  if (config.output_dir.empty()) throw ConfigError("output_dir", "must be set");
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  write_text(dir / "config.txt", to_config_text(config));

  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  if (!metrics) throw std::runtime_error("cannot open " + (dir / "metrics.csv").string());
  MetricsCsvSink sink(metrics);

  std::ofstream policy_file;
  std::optional<PolicyDumpSink> policy_sink;
  if (config.dump_policies) {
    policy_file.open(dir / "policies.csv", std::ios::binary);
    if (!policy_file) throw std::runtime_error("cannot open " + (dir / "policies.csv").string());
    policy_sink.emplace(policy_file);
  }

  SimulationHooks hooks;
  hooks.on_frame = [&](const MetricsFrame& f) { emit_frame(f, sink); };
  hooks.on_policies = [&](std::int64_t t, std::span<const Policy> p) {
    if (policy_sink) policy_sink->emit(t, p);
  };
  const auto result = simulate(config, hooks);

  const auto summary = summarize(result.frames, config.tail_span, result.census.generated);
  write_text(dir / "summary.txt", to_summary_text(summary));
  return summary;
}

std::vector<std::uint64_t> parse_seed_range(std::string_view text) {
  auto parse = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw ConfigError("seeds", "cannot parse seed range '" + std::string(text) + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) return {parse(text)};
  const auto a = parse(text.substr(0, dots));
  const auto b = parse(text.substr(dots + 2));
  if (b < a) throw ConfigError("seeds", "empty seed range '" + std::string(text) + "'");
  std::vector<std::uint64_t> seeds;
  for (auto s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

std::vector<SweepEntry> expand_sweep(const SweepSpec& spec) {
  if (spec.seeds.empty()) throw ConfigError("seeds", "sweep needs at least one seed");
  const auto algorithms =
      spec.algorithms.empty() ? std::vector<Algorithm>{spec.base.algorithm} : spec.algorithms;
  const auto etas = spec.etas.empty() ? std::vector<double>{spec.base.eta} : spec.etas;
  std::vector<SweepEntry> entries;
  for (auto algorithm : algorithms) {
    for (double eta : etas) {
      for (auto seed : spec.seeds) {
        SweepEntry e;
        e.config = spec.base;
        e.config.algorithm = algorithm;
        e.config.eta = eta;
        e.config.seed = seed;
        e.run_id = std::string(to_string(algorithm)) + "_eta" + format_double(eta) + "_seed" +
                   std::to_string(seed);
        e.config.output_dir = (spec.root / e.run_id).string();
        entries.push_back(std::move(e));
      }
    }
  }
  return entries;
}

std::vector<SweepEntry> sweep(const SweepSpec& spec) {
  auto entries = expand_sweep(spec);
  fs::create_directories(spec.root);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      auto& e = entries[i];
      try {
        e.summary = run(e.config);
        e.ok = true;
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
    }
  };
  const int threads = std::clamp(spec.parallel, 1, static_cast<int>(entries.size()));
  std::vector<std::jthread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::ostringstream index;
  index << "run_id,algorithm,eta,seed,status,final_window_atst,peak_atst,final_entropy_mean,"
           "tail_atst_relative_change,tail_entropy_change,total_tasks,error\n";
  for (const auto& e : entries) {
    std::string error = e.error;
    std::replace_if(error.begin(), error.end(), [](char c) { return c == ',' || c == '\n'; }, ';');
    index << e.run_id << ',' << to_string(e.config.algorithm) << ',' << format_double(e.config.eta)
          << ',' << e.config.seed << ',' << (e.ok ? "ok" : "failed") << ','
          << (e.ok ? field(e.summary.final_window_atst) : "") << ','
          << (e.ok ? field(e.summary.peak_atst) : "") << ','
          << (e.ok ? field(e.summary.final_entropy_mean) : "") << ','
          << (e.ok ? field(e.summary.tail.atst_relative_change) : "") << ','
          << (e.ok ? field(e.summary.tail.entropy_change) : "") << ','
          << (e.ok ? std::to_string(e.summary.total_tasks) : "") << ',' << error << '\n';
  }
  write_text(spec.root / "index.csv", index.str());
  return entries;
}

}  // namespace dtap
