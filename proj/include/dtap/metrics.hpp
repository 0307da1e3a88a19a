#ifndef DTAP_METRICS_HPP
#define DTAP_METRICS_HPP

#include "dtap/simplex.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dtap {

struct MetricsFrame {
  std::int64_t time = 0;
  std::uint64_t window_tasks = 0;
  double atst = 0;  // NaN when window_tasks == 0
  double entropy_mean = 0;
  double entropy_std = 0;
  std::uint64_t tasks_completed_total = 0;
};

struct EntropyStats {
  double mean = 0;
  double std = 0;  // population standard deviation
};

/// Mean and population standard deviation of policy entropy over agents.
EntropyStats entropy_snapshot(std::span<const Policy> policies);
EntropyStats entropy_snapshot(std::span<const double> entropies);

/// Attributes completed tasks to windows (k*w - w, k*w] by completion time.
class WindowAccumulator {
 public:
  explicit WindowAccumulator(std::int64_t window);

  std::int64_t window() const noexcept { return window_; }
  /// Index k of the window (k*w - w, k*w] containing `time`.
  std::int64_t window_index(double time) const;

  void record_completion(double tst, double completion_time);

  /// Removes window k and returns its frame; entropy fields come from
  /// `entropy`. tasks_completed_total counts every task recorded so far.
  MetricsFrame close_window(std::int64_t k, EntropyStats entropy);

  std::uint64_t total_tasks() const noexcept { return total_tasks_; }
  double total_tst() const noexcept { return total_tst_; }

 private:
  struct Sums {
    std::uint64_t count = 0;
    double tst = 0;
  };
  std::int64_t window_;
  std::map<std::int64_t, Sums> open_;
  std::uint64_t total_tasks_ = 0;
  double total_tst_ = 0;
};

/// Per-agent action tallies since the last reset.
class ActionCounter {
 public:
  ActionCounter() = default;
  explicit ActionCounter(std::vector<int> actions_per_agent);

  void record(std::int32_t agent, std::int32_t action);
  std::span<const std::uint64_t> counts(std::int32_t agent) const;
  std::size_t agents() const noexcept { return counts_.size(); }
  void reset();

 private:
  std::vector<std::vector<std::uint64_t>> counts_;
};

/// Normalized action frequencies; throws std::invalid_argument if all zero.
Policy empirical_policy(std::span<const std::uint64_t> counts);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

inline constexpr const char* kMetricsHeader =
    "time,window_tasks,atst,entropy_mean,entropy_std,tasks_completed_total";
inline constexpr const char* kPolicyDumpHeader = "time,agent_id,action_index,probability";

/// One CSV data row (no line terminator). Undefined ATST is a blank field.
std::string format_frame(const MetricsFrame& frame);

/// Writes the metrics CSV: header on construction, one flushed row per frame.
class MetricsCsvSink {
 public:
  explicit MetricsCsvSink(std::ostream& out);
  void emit(const MetricsFrame& frame);

 private:
  std::ostream& out_;
};

void emit_frame(const MetricsFrame& frame, MetricsCsvSink& sink);

class PolicyDumpSink {
 public:
  explicit PolicyDumpSink(std::ostream& out);
  void emit(std::int64_t time, std::span<const Policy> policies);

 private:
  std::ostream& out_;
};

/// Parses a metrics CSV produced by MetricsCsvSink. Throws std::runtime_error
/// on a header mismatch or malformed row.
std::vector<MetricsFrame> read_metrics_csv(std::istream& in);

/// Least-squares line through (x, y).
struct LinearTrend {
  double slope = 0;
  double intercept = 0;
  double mean = 0;  // mean of y
};

LinearTrend fit_trend(std::span<const double> x, std::span<const double> y);

/// Trend statistics of the frames with time in (end - span, end].
struct TailStats {
  std::int64_t span = 0;
  std::size_t frames = 0;
  double atst_mean = 0;  // task-weighted
  /// (second-half mean - first-half mean) / first-half mean, task-weighted.
  double atst_relative_change = 0;
  double entropy_slope = 0;
  /// Fitted entropy change across the span, in bits.
  double entropy_change = 0;
};

TailStats tail_stats(std::span<const MetricsFrame> frames, std::int64_t span);

/// Task-weighted mean ATST over frames with time in (begin, end]; NaN if no tasks.
double mean_atst(std::span<const MetricsFrame> frames, std::int64_t begin, std::int64_t end);

}  // namespace dtap

#endif  // DTAP_METRICS_HPP
