#ifndef DTAP_WORLD_HPP
#define DTAP_WORLD_HPP

#include "dtap/learners.hpp"
#include "dtap/metrics.hpp"
#include "dtap/topology.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dtap {

using Time = double;
using Tick = std::int64_t;
using TaskId = std::uint64_t;
using Rng = std::mt19937_64;

/// Service durations are rounded to multiples of this dyadic quantum. With
/// integer link delays and integer ticks every time value in a run is then a
/// multiple of 2^-20 well below 2^32, so sums and differences of times are
/// exact in double precision and TST accounting identities hold bit-for-bit.
inline constexpr double kTimeQuantum = 0x1.0p-20;

/// Rounds to the nearest positive multiple of kTimeQuantum.
Time quantize_duration(double duration);

/// Independent stream for (seed, agent, purpose) via SplitMix64 mixing.
Rng derive_stream(std::uint64_t seed, std::uint64_t agent, std::uint64_t purpose);

struct HopRecord {
  AgentId agent = 0;
  Time receipt_time = 0;
  ActionIndex action = kLocalAction;
};

struct Task {
  TaskId id = 0;
  AgentId origin = 0;
  Time arrival_time = 0;
  Time service_duration = 0;
  std::vector<HopRecord> hop_trail;
  Time enqueue_time = std::numeric_limits<double>::quiet_NaN();
  Time start_time = std::numeric_limits<double>::quiet_NaN();
  Time completion_time = std::numeric_limits<double>::quiet_NaN();

  bool completed() const noexcept { return completion_time == completion_time; }
};

/// Total service time: completion minus system arrival. Throws
/// std::logic_error for a task that has not completed.
Time task_tst(const Task& task);

enum class MessageKind { kRequest, kUpdate };

struct Message {
  MessageKind kind = MessageKind::kRequest;
  AgentId from = 0;
  AgentId to = 0;
  TaskId task = 0;
  /// Index into the task's hop trail of the receiving agent's hop. For a
  /// REQUEST this is the hop the receiver is about to create.
  std::int32_t hop = 0;
  Time r = 0;  // UPDATE only: completion time minus sender's receipt time
  Tick sent_at = 0;
  Tick deliver_at = 0;
  std::uint64_t sequence = 0;
};

/// Poisson(rate) tasks per generator for one time unit, each with an
/// Exponential(service_rate) service duration. Ids are taken from next_id.
std::vector<Task> generate_arrivals(std::span<const AgentId> generators, double rate,
                                    double service_rate, Tick now, Rng& rng,
                                    TaskId& next_id);

struct SimConfig {
  std::vector<AgentId> generators;
  double arrival_rate = 0.5;  // per generator per time unit
  double service_rate = 0.1;
  LearnerConfig learner;
  std::uint64_t seed = 1;
  bool learning = true;
  int max_hops = 0;  // 0: unlimited; otherwise the last allowed hop executes locally
};

/// One learner feedback, in the order the learner saw it.
struct RewardEvent {
  AgentId agent = 0;
  TaskId task = 0;
  std::int32_t hop = 0;
  ActionIndex action = kLocalAction;
  double reward = 0;
  Time r = 0;  // completion time minus this agent's receipt time
  Tick at = 0;
};

struct Census {
  std::uint64_t generated = 0;
  std::uint64_t completed = 0;
  std::uint64_t queued = 0;
  std::uint64_t in_transit = 0;
  std::uint64_t executing = 0;

  bool conserved() const noexcept {
    return generated == completed + queued + in_transit + executing;
  }
};

/// A forwarding decision awaiting its UPDATE.
struct PendingHop {
  Time receipt_time = 0;
  ActionIndex action = kLocalAction;
  AgentId upstream = -1;  // agent of the previous hop; -1 at the origin
};

struct AgentRuntime {
  std::deque<TaskId> queue;
  std::optional<TaskId> running;
  Time busy_until = 0;
  LearnerState learner;
  std::map<std::pair<TaskId, std::int32_t>, PendingHop> pending;
  Rng decision_rng;
  Rng arrival_rng;
};

/// The discrete-time DTAP world. Each step() advances the clock by one tick
/// and runs, in order: message delivery, task arrivals, dispatch of every
/// task received this tick, UPDATE processing, then execution and feedback
/// for completed tasks. Agents are visited in ascending id and messages in
/// (deliver_at, send sequence) order, so a (config, seed) pair fully
/// determines the trace.
class World {
 public:
  World(GridTopology topology, SimConfig config);

  void step();
  Tick now() const noexcept { return now_; }

  const GridTopology& topology() const noexcept { return topology_; }
  const SimConfig& config() const noexcept { return config_; }
  const AgentRuntime& agent(AgentId id) const;
  const Policy& policy(AgentId id) const { return agent(id).learner.policy; }

  /// Replaces an agent's policy (and GIGA-WoLF baseline). Combined with
  /// learning = false this pins the agent's behavior.
  void set_policy(AgentId id, Policy policy);

  /// Queues a task that arrives at `origin` on the next tick, in addition
  /// to any Poisson arrivals.
  TaskId schedule_arrival(AgentId origin, Time service_duration);

  Census census() const;
  const Task* find_task(TaskId id) const;

  /// Dispatch decisions per (agent, action) since the last reset.
  const ActionCounter& action_counter() const noexcept { return action_counter_; }
  void reset_action_counter() { action_counter_.reset(); }

  void on_completion(std::function<void(const Task&)> callback) {
    on_completion_ = std::move(callback);
  }
  void on_reward(std::function<void(const RewardEvent&)> callback) {
    on_reward_ = std::move(callback);
  }
  void on_send(std::function<void(const Message&)> callback) {
    on_send_ = std::move(callback);
  }

 private:
  struct MessageOrder {
    bool operator()(const Message& a, const Message& b) const {
      if (a.deliver_at != b.deliver_at) return a.deliver_at > b.deliver_at;
      return a.sequence > b.sequence;
    }
  };

  struct Inbound {
    TaskId task;
    std::int32_t hop;
  };

  AgentRuntime& runtime(AgentId id) { return agents_[static_cast<std::size_t>(id)]; }
  void send(Message message);
  void dispatch(AgentId agent, TaskId task_id, std::int32_t hop);
  void process_update(const Message& update);
  void advance_execution(AgentId agent);
  void complete(AgentId agent, Task& task);
  void observe(AgentId agent, TaskId task, std::int32_t hop, ActionIndex action,
               double reward, Time r);

  GridTopology topology_;
  SimConfig config_;
  Tick now_ = 0;
  TaskId next_task_id_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t generated_ = 0;
  std::uint64_t completed_ = 0;
  std::uint64_t requests_in_flight_ = 0;

  std::vector<AgentRuntime> agents_;
  std::unordered_map<TaskId, Task> tasks_;
  std::priority_queue<Message, std::vector<Message>, MessageOrder> messages_;
  std::vector<std::vector<Inbound>> inbox_;
  std::vector<Task> scheduled_;
  ActionCounter action_counter_;

  std::function<void(const Task&)> on_completion_;
  std::function<void(const RewardEvent&)> on_reward_;
  std::function<void(const Message&)> on_send_;
};

}  // namespace dtap

#endif  // DTAP_WORLD_HPP
