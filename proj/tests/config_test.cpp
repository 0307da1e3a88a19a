#include "dtap/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dtap;

namespace {

std::string error_field(const RunConfig& c) {
  try {
    validate(c);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return {};
}

}  // namespace

TEST_CASE("presets set the reference scenario") {
  const auto names = preset_names();
  REQUIRE(names.size() == 2);
  for (const auto& name : names) {
    const auto c = apply_preset(RunConfig{}, name);
    CHECK(c.grid_rows == 10);
    CHECK(c.grid_cols == 10);
    CHECK(c.adjacent_delay == 2);
    CHECK(c.generator_rows == 4);
    CHECK(c.generator_cols == 4);
    CHECK(c.arrival_rate == 0.5);
    CHECK(c.service_rate == 0.1);
    CHECK_NOTHROW(validate(c));
  }
  CHECK(apply_preset({}, "paper-200k").duration == 200000);
  CHECK(apply_preset({}, "paper-600k").duration == 600000);
  CHECK_THROWS_AS(apply_preset({}, "paper-1m"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  RunConfig c;
  c.generator_rows = c.generator_cols = 11;
  CHECK(error_field(c) == "generator_rows");

  c = {};
  c.duration = 0;
  CHECK(error_field(c) == "duration");

  c = {};
  c.window = 0;
  CHECK(error_field(c) == "window");

  c = {};
  c.eta = 0;
  CHECK(error_field(c) == "eta");

  c = {};
  c.alpha = 1.5;
  CHECK(error_field(c) == "alpha");

  c = {};
  c.service_rate = -1;
  CHECK(error_field(c) == "service_rate");

  c = {};
  c.epsilon_floor = 0.25;  // interior agents have five actions
  CHECK(error_field(c) == "epsilon_floor");

  c = {};
  c.generator_rows = 3;
  c.generator_cols = 3;
  CHECK(!error_field(c).empty());

  CHECK(error_field(RunConfig{}).empty());
}

TEST_CASE("config text parsing") {
  const auto c = parse_config_text(
      "# comment\n"
      "algorithm = giga-wolf\n"
      "\n"
      "eta=1e-5  # trailing comment\n"
      "seed=9\n"
      "dump_policies=true\n");
  CHECK(c.algorithm == Algorithm::kGigaWolf);
  CHECK(c.eta == 1e-5);
  CHECK(c.seed == 9);
  CHECK(c.dump_policies);
  CHECK(c.grid_rows == 10);

  CHECK_THROWS_AS(parse_config_text("colour=blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("seed=abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("algorithm=qlearning\n"), ConfigError);
  try {
    parse_config_text("colour=blue\n");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "colour");
  }
}

TEST_CASE("echoed config parses back to the same config") {
  RunConfig c = apply_preset({}, "paper-600k");
  c.algorithm = Algorithm::kGigaWolf;
  c.eta = 3.3e-7;
  c.alpha = 0.123456789;
  c.seed = 123456789012345ULL;
  c.output_dir = "some/dir";
  c.dump_policies = true;
  c.max_hops = 7;
  CHECK(parse_config_text(to_config_text(c)) == c);
  CHECK(parse_config_text(to_config_text(RunConfig{})) == RunConfig{});
}

TEST_CASE("load order: defaults, preset, file, overrides") {
  const auto path = std::filesystem::temp_directory_path() / "dtap_config_test.txt";
  {
    std::ofstream out(path);
    out << "duration=5000\nseed=4\neta=2e-6\n";
  }
  ConfigSource src;
  src.preset = "paper-600k";
  src.file = path.string();
  src.overrides = {{"seed", "11"}};
  const auto c = load_config(src);
  CHECK(c.duration == 5000);  // file beats preset
  CHECK(c.seed == 11);        // override beats file
  CHECK(c.eta == 2e-6);
  CHECK(c.grid_rows == 10);

  src.overrides = {{"duration", "0"}};
  CHECK_THROWS_AS(load_config(src), ConfigError);

  ConfigSource missing;
  missing.file = (std::filesystem::temp_directory_path() / "dtap_no_such_file.txt").string();
  CHECK_THROWS_AS(load_config(missing), ConfigError);
  std::filesystem::remove(path);
}
