#include "dtap/metrics.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dtap {

EntropyStats entropy_snapshot(std::span<const double> entropies) {
  if (entropies.empty()) throw std::invalid_argument("entropy snapshot needs at least one agent");
  const Eigen::Map<const Eigen::ArrayXd> h(entropies.data(),
                                           static_cast<Eigen::Index>(entropies.size()));
  const double mean = h.mean();
  const double variance = (h - mean).square().mean();
  return {mean, std::sqrt(variance)};
}

EntropyStats entropy_snapshot(std::span<const Policy> policies) {
  std::vector<double> h;
  h.reserve(policies.size());
  for (const auto& p : policies) h.push_back(entropy(p));
  return entropy_snapshot(std::span<const double>(h));
}

WindowAccumulator::WindowAccumulator(std::int64_t window) : window_(window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

std::int64_t WindowAccumulator::window_index(double time) const {
  return static_cast<std::int64_t>(std::ceil(time / double(window_)));
}

void WindowAccumulator::record_completion(double tst, double completion_time) {
  if (!(tst >= 0)) throw std::invalid_argument("task TST must be non-negative");
  auto& sums = open_[window_index(completion_time)];
  ++sums.count;
  sums.tst += tst;
  ++total_tasks_;
  total_tst_ += tst;
}

MetricsFrame WindowAccumulator::close_window(std::int64_t k, EntropyStats entropy) {
  MetricsFrame frame;
  frame.time = k * window_;
  frame.atst = std::numeric_limits<double>::quiet_NaN();
  if (auto it = open_.find(k); it != open_.end()) {
    frame.window_tasks = it->second.count;
    frame.atst = it->second.tst / double(it->second.count);
    open_.erase(it);
  }
  frame.entropy_mean = entropy.mean;
  frame.entropy_std = entropy.std;
  frame.tasks_completed_total = total_tasks_;
  return frame;
}

ActionCounter::ActionCounter(std::vector<int> actions_per_agent) {
  counts_.reserve(actions_per_agent.size());
  for (int n : actions_per_agent) {
    counts_.emplace_back(static_cast<std::size_t>(n), 0);
  }
}

void ActionCounter::record(std::int32_t agent, std::int32_t action) {
  counts_.at(static_cast<std::size_t>(agent)).at(static_cast<std::size_t>(action)) += 1;
}

std::span<const std::uint64_t> ActionCounter::counts(std::int32_t agent) const {
  return counts_.at(static_cast<std::size_t>(agent));
}

void ActionCounter::reset() {
  for (auto& c : counts_) std::fill(c.begin(), c.end(), 0);
}

Policy empirical_policy(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("empirical policy of an all-zero counter");
  Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    p[static_cast<Eigen::Index>(k)] = double(counts[k]) / double(total);
  }
  return Policy(std::move(p));
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string format_frame(const MetricsFrame& frame) {
  std::string row = std::to_string(frame.time);
  row += ',';
  row += std::to_string(frame.window_tasks);
  row += ',';
  if (frame.window_tasks > 0 && std::isfinite(frame.atst)) row += format_double(frame.atst);
  row += ',';
  row += format_double(frame.entropy_mean);
  row += ',';
  row += format_double(frame.entropy_std);
  row += ',';
  row += std::to_string(frame.tasks_completed_total);
  return row;
}

MetricsCsvSink::MetricsCsvSink(std::ostream& out) : out_(out) {
  out_ << kMetricsHeader << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("failed to write metrics header");
}

void MetricsCsvSink::emit(const MetricsFrame& frame) {
  out_ << format_frame(frame) << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("failed to write metrics frame");
}

void emit_frame(const MetricsFrame& frame, MetricsCsvSink& sink) { sink.emit(frame); }

PolicyDumpSink::PolicyDumpSink(std::ostream& out) : out_(out) {
  out_ << kPolicyDumpHeader << '\n';
  if (!out_) throw std::runtime_error("failed to write policy dump header");
}

void PolicyDumpSink::emit(std::int64_t time, std::span<const Policy> policies) {
  for (std::size_t agent = 0; agent < policies.size(); ++agent) {
    const auto& p = policies[agent];
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      out_ << time << ',' << agent << ',' << k << ',' << format_double(p[k]) << '\n';
    }
  }
  out_.flush();
  if (!out_) throw std::runtime_error("failed to write policy dump");
}

namespace {

template <typename T>
T parse_number(const std::string& field, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto result = std::from_chars(field.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw std::runtime_error("metrics CSV line " + std::to_string(line) +
                             ": malformed field '" + field + "'");
  }
  return value;
}

}  // namespace

std::vector<MetricsFrame> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw std::runtime_error("metrics CSV header mismatch");
  }
  std::vector<MetricsFrame> frames;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 6) {
      throw std::runtime_error("metrics CSV line " + std::to_string(line_no) +
                               ": expected 6 fields");
    }
    MetricsFrame f;
    f.time = parse_number<std::int64_t>(fields[0], line_no);
    f.window_tasks = parse_number<std::uint64_t>(fields[1], line_no);
    f.atst = fields[2].empty() ? std::numeric_limits<double>::quiet_NaN()
                               : parse_number<double>(fields[2], line_no);
    f.entropy_mean = parse_number<double>(fields[3], line_no);
    f.entropy_std = parse_number<double>(fields[4], line_no);
    f.tasks_completed_total = parse_number<std::uint64_t>(fields[5], line_no);
    frames.push_back(f);
  }
  return frames;
}

LinearTrend fit_trend(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("trend inputs differ in length");
  if (x.empty()) throw std::invalid_argument("trend needs at least one point");
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), n);
  const Eigen::Map<const Eigen::VectorXd> ys(y.data(), n);
  LinearTrend trend;
  trend.mean = ys.mean();
  if (n < 2) {
    trend.intercept = trend.mean;
    return trend;
  }
  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  design.col(1) = xs.array() - xs.mean();
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(ys);
  trend.slope = coef[1];
  trend.intercept = coef[0] - coef[1] * xs.mean();
  return trend;
}

TailStats tail_stats(std::span<const MetricsFrame> frames, std::int64_t span) {
  TailStats stats;
  stats.span = span;
  if (frames.empty()) return stats;
  const std::int64_t end = frames.back().time;
  const std::int64_t begin = end - span;
  std::vector<double> t_ent, ent;
  for (const auto& f : frames) {
    if (f.time <= begin) continue;
    t_ent.push_back(double(f.time));
    ent.push_back(f.entropy_mean);
  }
  stats.frames = t_ent.size();
  if (!ent.empty()) {
    const auto e = fit_trend(t_ent, ent);
    stats.entropy_slope = e.slope;
    stats.entropy_change = e.slope * double(span);
  }
  const std::int64_t middle = begin + span / 2;
  stats.atst_mean = mean_atst(frames, begin, end);
  const double first = mean_atst(frames, begin, middle);
  const double second = mean_atst(frames, middle, end);
  stats.atst_relative_change = (second - first) / first;
  return stats;
}

double mean_atst(std::span<const MetricsFrame> frames, std::int64_t begin, std::int64_t end) {
  double sum = 0;
  std::uint64_t count = 0;
  for (const auto& f : frames) {
    if (f.time <= begin || f.time > end || f.window_tasks == 0) continue;
    sum += f.atst * double(f.window_tasks);
    count += f.window_tasks;
  }
  return count > 0 ? sum / double(count) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace dtap
