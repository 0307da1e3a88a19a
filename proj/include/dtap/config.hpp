#ifndef DTAP_CONFIG_HPP
#define DTAP_CONFIG_HPP

#include "dtap/learners.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dtap {

/// A rejected configuration. field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Everything that determines a run. Defaults reproduce the 10x10 grid
/// setting over 200k time units.
struct RunConfig {
  int grid_rows = 10;
  int grid_cols = 10;
  int adjacent_delay = 2;
  int generator_rows = 4;
  int generator_cols = 4;
  double arrival_rate = 0.5;  // per generator
  double service_rate = 0.1;
  Algorithm algorithm = Algorithm::kWpl;
  double eta = 1e-7;
  double alpha = 0.1;
  double epsilon_floor = 0.01;
  std::int64_t duration = 200000;
  std::int64_t window = 1000;
  std::uint64_t seed = 1;
  std::string output_dir;
  bool dump_policies = false;
  int policy_dump_every = 10;  // windows between policy dumps
  int max_hops = 0;            // 0: unlimited
  std::int64_t tail_span = 50000;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::vector<std::string> preset_names();
/// Overwrites the preset's fields on `base`. Throws ConfigError for an
/// unknown name.
RunConfig apply_preset(RunConfig base, std::string_view name);

/// Sets one field from its textual value. Unknown keys and unparsable
/// values throw ConfigError.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// key=value lines; '#' starts a comment; blank lines are ignored.
RunConfig parse_config_text(std::string_view text, RunConfig base = {});

/// Every field, one key=value per line, in a stable order. Parsing the
/// result reproduces the config exactly.
std::string to_config_text(const RunConfig& config);

/// Throws ConfigError naming the first field that violates an invariant.
void validate(const RunConfig& config);

struct ConfigSource {
  std::optional<std::string> preset;
  std::optional<std::string> file;
  std::vector<std::pair<std::string, std::string>> overrides;
};

/// defaults <- preset <- file <- overrides, then validate().
RunConfig load_config(const ConfigSource& source);

}  // namespace dtap

#endif  // DTAP_CONFIG_HPP
