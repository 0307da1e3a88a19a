#include "dtap/config.hpp"

#include "dtap/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dtap {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto result = std::from_chars(value.data(), end, out);
  if (value.empty() || result.ec != std::errc() || result.ptr != end) {
    throw ConfigError(std::string(key), "cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(value) + "'");
}

}  // namespace

std::vector<std::string> preset_names() { return {"paper-200k", "paper-600k"}; }

RunConfig apply_preset(RunConfig base, std::string_view name) {
  if (name != "paper-200k" && name != "paper-600k") {
    throw ConfigError("preset", "unknown preset '" + std::string(name) +
                                    "' (expected paper-200k or paper-600k)");
  }
  base.grid_rows = 10;
  base.grid_cols = 10;
  base.adjacent_delay = 2;
  base.generator_rows = 4;
  base.generator_cols = 4;
  base.arrival_rate = 0.5;
  base.service_rate = 0.1;
  base.duration = name == "paper-200k" ? 200000 : 600000;
  return base;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  const std::string k(key);
  if (key == "grid_rows") c.grid_rows = parse_value<int>(key, value);
  else if (key == "grid_cols") c.grid_cols = parse_value<int>(key, value);
  else if (key == "adjacent_delay") c.adjacent_delay = parse_value<int>(key, value);
  else if (key == "generator_rows") c.generator_rows = parse_value<int>(key, value);
  else if (key == "generator_cols") c.generator_cols = parse_value<int>(key, value);
  else if (key == "arrival_rate") c.arrival_rate = parse_value<double>(key, value);
  else if (key == "service_rate") c.service_rate = parse_value<double>(key, value);
  else if (key == "algorithm") {
    try {
      c.algorithm = parse_algorithm(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(k, e.what());
    }
  } else if (key == "eta") c.eta = parse_value<double>(key, value);
  else if (key == "alpha") c.alpha = parse_value<double>(key, value);
  else if (key == "epsilon_floor") c.epsilon_floor = parse_value<double>(key, value);
  else if (key == "duration") c.duration = parse_value<std::int64_t>(key, value);
  else if (key == "window") c.window = parse_value<std::int64_t>(key, value);
  else if (key == "seed") c.seed = parse_value<std::uint64_t>(key, value);
  else if (key == "output_dir") c.output_dir = std::string(value);
  else if (key == "dump_policies") c.dump_policies = parse_bool(key, value);
  else if (key == "policy_dump_every") c.policy_dump_every = parse_value<int>(key, value);
  else if (key == "max_hops") c.max_hops = parse_value<int>(key, value);
  else if (key == "tail_span") c.tail_span = parse_value<std::int64_t>(key, value);
  else throw ConfigError(k, "unknown configuration key");
}

RunConfig parse_config_text(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  out << "grid_rows=" << c.grid_rows << '\n'
      << "grid_cols=" << c.grid_cols << '\n'
      << "adjacent_delay=" << c.adjacent_delay << '\n'
      << "generator_rows=" << c.generator_rows << '\n'
      << "generator_cols=" << c.generator_cols << '\n'
      << "arrival_rate=" << format_double(c.arrival_rate) << '\n'
      << "service_rate=" << format_double(c.service_rate) << '\n'
      << "algorithm=" << to_string(c.algorithm) << '\n'
      << "eta=" << format_double(c.eta) << '\n'
      << "alpha=" << format_double(c.alpha) << '\n'
      << "epsilon_floor=" << format_double(c.epsilon_floor) << '\n'
      << "duration=" << c.duration << '\n'
      << "window=" << c.window << '\n'
      << "seed=" << c.seed << '\n'
      << "output_dir=" << c.output_dir << '\n'
      << "dump_policies=" << (c.dump_policies ? "true" : "false") << '\n'
      << "policy_dump_every=" << c.policy_dump_every << '\n'
      << "max_hops=" << c.max_hops << '\n'
      << "tail_span=" << c.tail_span << '\n';
  return out.str();
}

void validate(const RunConfig& c) {
  if (c.grid_rows < 1) throw ConfigError("grid_rows", "must be >= 1");
  if (c.grid_cols < 1) throw ConfigError("grid_cols", "must be >= 1");
  if (c.adjacent_delay < 1) throw ConfigError("adjacent_delay", "must be >= 1");
  if (c.generator_rows < 0 || c.generator_rows > c.grid_rows) {
    throw ConfigError("generator_rows", "region of " + std::to_string(c.generator_rows) +
                                            " rows does not fit in " +
                                            std::to_string(c.grid_rows) + " grid rows");
  }
  if (c.generator_cols < 0 || c.generator_cols > c.grid_cols) {
    throw ConfigError("generator_cols", "region of " + std::to_string(c.generator_cols) +
                                            " columns does not fit in " +
                                            std::to_string(c.grid_cols) + " grid columns");
  }
  if ((c.grid_rows - c.generator_rows) % 2 != 0) {
    throw ConfigError("generator_rows", "region cannot be centered (parity differs from grid_rows)");
  }
  if ((c.grid_cols - c.generator_cols) % 2 != 0) {
    throw ConfigError("generator_cols", "region cannot be centered (parity differs from grid_cols)");
  }
  if (!(c.arrival_rate >= 0)) throw ConfigError("arrival_rate", "must be >= 0");
  if (!(c.service_rate > 0)) throw ConfigError("service_rate", "must be > 0");
  if (!(c.eta > 0)) throw ConfigError("eta", "must be > 0");
  if (!(c.alpha > 0 && c.alpha <= 1)) throw ConfigError("alpha", "must lie in (0, 1]");
  // The floor has to be feasible for the largest action set (interior agents).
  const int max_actions = 1 + (c.grid_rows > 2 ? 2 : c.grid_rows - 1) +
                          (c.grid_cols > 2 ? 2 : c.grid_cols - 1);
  if (!(c.epsilon_floor >= 0) || c.epsilon_floor * max_actions >= 1) {
    throw ConfigError("epsilon_floor",
                      "must lie in [0, 1/" + std::to_string(max_actions) + ")");
  }
  if (c.duration < 1) throw ConfigError("duration", "must be > 0");
  if (c.window < 1) throw ConfigError("window", "must be > 0");
  if (c.policy_dump_every < 1) throw ConfigError("policy_dump_every", "must be >= 1");
  if (c.max_hops < 0) throw ConfigError("max_hops", "must be >= 0 (0 = unlimited)");
  if (c.tail_span < 1) throw ConfigError("tail_span", "must be > 0");
}

RunConfig load_config(const ConfigSource& source) {
  RunConfig config;
  if (source.preset) config = apply_preset(config, *source.preset);
  if (source.file) {
    std::ifstream in(*source.file);
    if (!in) throw ConfigError("config", "cannot read '" + *source.file + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    config = parse_config_text(buffer.str(), config);
  }
  for (const auto& [key, value] : source.overrides) apply_setting(config, key, value);
  validate(config);
  return config;
}

}  // namespace dtap
