#include "dtap/metrics.hpp"
#include "dtap/runner.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace dtap;

namespace {

MetricsFrame frame(std::int64_t time, std::uint64_t tasks, double atst, double h = 1.0) {
  MetricsFrame f;
  f.time = time;
  f.window_tasks = tasks;
  f.atst = tasks > 0 ? atst : std::nan("");
  f.entropy_mean = h;
  return f;
}

}  // namespace

TEST_CASE("window ATST from listed completions") {
  WindowAccumulator acc(1000);
  acc.record_completion(10, 500);
  acc.record_completion(20, 999.5);
  acc.record_completion(30, 1000);  // boundary belongs to the closing window
  acc.record_completion(40, 1000.25);
  const auto f1 = acc.close_window(1, {2.0, 0.1});
  CHECK(f1.time == 1000);
  CHECK(f1.window_tasks == 3);
  CHECK(f1.atst == 20.0);
  CHECK(f1.tasks_completed_total == 4);
  const auto f2 = acc.close_window(2, {2.0, 0.1});
  CHECK(f2.window_tasks == 1);
  CHECK(f2.atst == 40.0);
  const auto f3 = acc.close_window(3, {2.0, 0.1});
  CHECK(f3.window_tasks == 0);
  CHECK(std::isnan(f3.atst));
  CHECK(acc.total_tasks() == 4);
  CHECK_THROWS_AS(acc.record_completion(-1, 10), std::invalid_argument);
  CHECK_THROWS_AS(WindowAccumulator(0), std::invalid_argument);
}

TEST_CASE("task-weighted window means recover the overall mean") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> when(0.001, 20000), tst(0, 300);
  WindowAccumulator acc(1000);
  double sum = 0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const double t = tst(rng);
    sum += t;
    acc.record_completion(t, when(rng));
  }
  std::vector<MetricsFrame> frames;
  for (int k = 1; k <= 20; ++k) frames.push_back(acc.close_window(k, {0, 0}));
  std::uint64_t tasks = 0;
  for (const auto& f : frames) tasks += f.window_tasks;
  CHECK(tasks == n);
  CHECK(mean_atst(frames, 0, 20000) == doctest::Approx(sum / n).epsilon(1e-12));
  CHECK(acc.total_tst() == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("entropy snapshot") {
  std::vector<Policy> uniform(100, Policy::uniform(5));
  const auto s = entropy_snapshot(std::span<const Policy>(uniform));
  CHECK(s.mean == doctest::Approx(2.321928).epsilon(1e-6));
  CHECK(s.std == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<double> h(100, 0.0);
  for (int i = 0; i < 50; ++i) h[i] = 1.0;
  const auto half = entropy_snapshot(std::span<const double>(h));
  CHECK(half.mean == 0.5);
  CHECK(half.std == 0.5);
  CHECK_THROWS_AS(entropy_snapshot(std::span<const double>()), std::invalid_argument);
}

TEST_CASE("empirical policy from action counts") {
  const std::vector<std::uint64_t> c{30, 10, 60};
  const auto p = empirical_policy(c);
  CHECK(p[0] == doctest::Approx(0.3));
  CHECK(p[2] == doctest::Approx(0.6));
  const std::vector<std::uint64_t> zero{0, 0};
  CHECK_THROWS_AS(empirical_policy(zero), std::invalid_argument);

  ActionCounter counter({3, 1});
  counter.record(0, 2);
  counter.record(0, 2);
  counter.record(1, 0);
  CHECK(counter.counts(0)[2] == 2);
  CHECK(empirical_policy(counter.counts(0))[2] == 1.0);
  counter.reset();
  CHECK(counter.counts(1)[0] == 0);
  CHECK_THROWS(counter.record(1, 1));
}

TEST_CASE("CSV rows") {
  MetricsFrame f;
  f.time = 1000;
  f.window_tasks = 42;
  f.atst = 95.5;
  f.entropy_mean = 2.1;
  f.entropy_std = 0.31;
  f.tasks_completed_total = 42;
  CHECK(format_frame(f) == "1000,42,95.5,2.1,0.31,42");

  f.time = 2000;
  f.window_tasks = 0;
  f.atst = std::nan("");
  f.entropy_mean = 2.05;
  f.entropy_std = 0.3;
  CHECK(format_frame(f) == "2000,0,,2.05,0.3,42");

  CHECK(std::string(kMetricsHeader) ==
        "time,window_tasks,atst,entropy_mean,entropy_std,tasks_completed_total");
  CHECK(std::string(kPolicyDumpHeader) == "time,agent_id,action_index,probability");
}

TEST_CASE("CSV round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1000);
  std::vector<MetricsFrame> frames;
  std::uint64_t total = 0;
  for (int k = 1; k <= 50; ++k) {
    const std::uint64_t n = k % 7 == 0 ? 0 : static_cast<std::uint64_t>(u(rng));
    total += n;
    auto f = frame(k * 1000, n, u(rng), u(rng) / 400);
    f.entropy_std = u(rng) / 3000;
    f.tasks_completed_total = total;
    frames.push_back(f);
  }
  std::stringstream ss;
  {
    MetricsCsvSink sink(ss);
    for (const auto& f : frames) sink.emit(f);
  }
  const auto back = read_metrics_csv(ss);
  REQUIRE(back.size() == frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(back[i].time == frames[i].time);
    CHECK(back[i].window_tasks == frames[i].window_tasks);
    if (frames[i].window_tasks == 0) {
      CHECK(std::isnan(back[i].atst));
    } else {
      CHECK(back[i].atst == frames[i].atst);
    }
    CHECK(back[i].entropy_mean == frames[i].entropy_mean);
    CHECK(back[i].entropy_std == frames[i].entropy_std);
    CHECK(back[i].tasks_completed_total == frames[i].tasks_completed_total);
  }

  std::stringstream bad("time,atst\n1,2\n");
  CHECK_THROWS_AS(read_metrics_csv(bad), std::runtime_error);
}

TEST_CASE("policy dump rows") {
  std::stringstream ss;
  PolicyDumpSink sink(ss);
  std::vector<Policy> p{Policy::uniform(2), Policy::point_mass(3, 1)};
  sink.emit(5000, p);
  CHECK(ss.str() ==
        "time,agent_id,action_index,probability\n"
        "5000,0,0,0.5\n5000,0,1,0.5\n"
        "5000,1,0,0\n5000,1,1,1\n5000,1,2,0\n");
}

TEST_CASE("trend fit on exact lines") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{3, 5, 7, 9, 11};
  const auto t = fit_trend(x, y);
  CHECK(t.slope == doctest::Approx(2.0));
  CHECK(t.intercept == doctest::Approx(1.0));
  CHECK(t.mean == doctest::Approx(7.0));
  CHECK_THROWS_AS(fit_trend(x, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("tail statistics") {
  std::vector<MetricsFrame> frames;
  for (int k = 1; k <= 100; ++k) {
    // ATST 100 in the first half of the tail, 110 in the second.
    const double atst = k <= 75 ? 100.0 : 110.0;
    frames.push_back(frame(k * 1000, 10, atst, 2.0 - 1e-6 * k * 1000));
  }
  const auto s = tail_stats(frames, 50000);
  CHECK(s.frames == 50);
  CHECK(s.entropy_slope == doctest::Approx(-1e-6));
  CHECK(s.entropy_change == doctest::Approx(-0.05));
  CHECK(s.atst_mean == doctest::Approx(105.0));
  CHECK(s.atst_relative_change == doctest::Approx(0.1));
  CHECK(std::isnan(mean_atst(frames, 200000, 300000)));
}

TEST_CASE("one CSV row per window plus header") {
  RunConfig c;
  c.grid_rows = c.grid_cols = 1;
  c.generator_rows = c.generator_cols = 1;
  c.arrival_rate = 0.05;
  c.duration = 600000;
  c.window = 1000;
  std::stringstream ss;
  MetricsCsvSink sink(ss);
  SimulationHooks hooks;
  hooks.on_frame = [&](const MetricsFrame& f) { sink.emit(f); };
  const auto result = simulate(c, hooks);
  CHECK(result.frames.size() == 600);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(ss, line)) ++lines;
  CHECK(lines == 601);
  CHECK(result.census.conserved());
}

TEST_CASE("replaying a recorded completion trace reproduces the frames") {
  RunConfig c;
  c.grid_rows = c.grid_cols = 4;
  c.generator_rows = c.generator_cols = 2;
  c.arrival_rate = 0.4;
  c.eta = 1e-4;
  c.duration = 10000;
  c.window = 250;
  std::vector<std::pair<double, double>> trace;
  SimulationHooks hooks;
  hooks.on_completion = [&](const Task& t) { trace.emplace_back(task_tst(t), t.completion_time); };
  const auto result = simulate(c, hooks);

  WindowAccumulator acc(c.window);
  std::size_t next = 0;
  for (const auto& f : result.frames) {
    while (next < trace.size() && trace[next].second <= double(f.time)) {
      acc.record_completion(trace[next].first, trace[next].second);
      ++next;
    }
    const auto g = acc.close_window(f.time / c.window, {f.entropy_mean, f.entropy_std});
    CHECK(format_frame(g) == format_frame(f));
  }
}
