#include "dtap/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dtap {

namespace {

enum StreamPurpose : std::uint64_t { kDecisionStream = 1, kArrivalStream = 2 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Time quantize_duration(double duration) {
  if (!(duration > 0) || !std::isfinite(duration)) {
    throw std::invalid_argument("duration must be positive and finite");
  }
  const double steps = std::max(1.0, std::nearbyint(duration / kTimeQuantum));
  return steps * kTimeQuantum;
}

Rng derive_stream(std::uint64_t seed, std::uint64_t agent, std::uint64_t purpose) {
  const std::uint64_t mixed = splitmix64(splitmix64(splitmix64(seed) ^ agent) ^ purpose);
  std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
  return Rng(seq);
}

Time task_tst(const Task& task) {
  if (!task.completed()) {
    throw std::logic_error("task " + std::to_string(task.id) + " has not completed");
  }
  return task.completion_time - task.arrival_time;
}

std::vector<Task> generate_arrivals(std::span<const AgentId> generators, double rate,
                                    double service_rate, Tick now, Rng& rng,
                                    TaskId& next_id) {
  if (!(rate >= 0)) throw std::invalid_argument("arrival rate must be >= 0");
  std::vector<Task> tasks;
  if (rate == 0) return tasks;
  if (!(service_rate > 0)) throw std::invalid_argument("service rate must be > 0");
  std::poisson_distribution<int> count(rate);
  std::exponential_distribution<double> service(service_rate);
  for (AgentId g : generators) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      Task t;
      t.id = next_id++;
      t.origin = g;
      t.arrival_time = double(now);
      t.service_duration = quantize_duration(service(rng));
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

World::World(GridTopology topology, SimConfig config)
    : topology_(std::move(topology)), config_(std::move(config)) {
  if (!(config_.arrival_rate >= 0)) throw std::invalid_argument("arrival rate must be >= 0");
  if (!(config_.service_rate > 0)) throw std::invalid_argument("service rate must be > 0");
  if (config_.max_hops < 0) throw std::invalid_argument("max_hops must be >= 0");
  std::sort(config_.generators.begin(), config_.generators.end());
  config_.generators.erase(std::unique(config_.generators.begin(), config_.generators.end()),
                           config_.generators.end());
  for (AgentId g : config_.generators) {
    if (g < 0 || g >= topology_.size()) throw std::invalid_argument("generator id out of range");
  }

  const auto n = static_cast<std::size_t>(topology_.size());
  agents_.reserve(n);
  std::vector<int> actions;
  for (AgentId id = 0; id < topology_.size(); ++id) {
    const int num_actions = topology_.action_count(id);
    actions.push_back(num_actions);
    agents_.push_back(AgentRuntime{
        {}, std::nullopt, 0.0, LearnerState::initial(num_actions, config_.learner), {},
        derive_stream(config_.seed, static_cast<std::uint64_t>(id), kDecisionStream),
        derive_stream(config_.seed, static_cast<std::uint64_t>(id), kArrivalStream)});
  }
  inbox_.resize(n);
  action_counter_ = ActionCounter(std::move(actions));
}

const AgentRuntime& World::agent(AgentId id) const {
  if (id < 0 || id >= topology_.size()) throw std::out_of_range("agent id out of range");
  return agents_[static_cast<std::size_t>(id)];
}

void World::set_policy(AgentId id, Policy policy) {
  if (id < 0 || id >= topology_.size()) throw std::out_of_range("agent id out of range");
  auto& learner = runtime(id).learner;
  if (policy.size() != learner.policy.size()) {
    throw std::invalid_argument("policy size does not match the agent's action set");
  }
  learner.z = policy;
  learner.policy = std::move(policy);
}

TaskId World::schedule_arrival(AgentId origin, Time service_duration) {
  if (origin < 0 || origin >= topology_.size()) throw std::out_of_range("agent id out of range");
  Task t;
  t.id = next_task_id_++;
  t.origin = origin;
  t.service_duration = quantize_duration(service_duration);
  scheduled_.push_back(std::move(t));
  return scheduled_.back().id;
}

Census World::census() const {
  Census c;
  c.generated = generated_;
  c.completed = completed_;
  c.in_transit = requests_in_flight_;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    c.queued += agents_[i].queue.size();
    c.executing += agents_[i].running.has_value() ? 1 : 0;
    c.in_transit += inbox_[i].size();
  }
  return c;
}

const Task* World::find_task(TaskId id) const {
  const auto it = tasks_.find(id);
  return it == tasks_.end() ? nullptr : &it->second;
}

void World::send(Message message) {
  message.sent_at = now_;
  message.deliver_at = now_ + topology_.link_delay(message.from, message.to);
  message.sequence = next_sequence_++;
  if (message.kind == MessageKind::kRequest) ++requests_in_flight_;
  if (on_send_) on_send_(message);
  messages_.push(message);
}

void World::step() {
  ++now_;

  // Deliveries.
  std::vector<Message> updates;
  while (!messages_.empty() && messages_.top().deliver_at <= now_) {
    Message m = messages_.top();
    messages_.pop();
    if (m.kind == MessageKind::kRequest) {
      --requests_in_flight_;
      inbox_[static_cast<std::size_t>(m.to)].push_back({m.task, m.hop});
    } else {
      updates.push_back(m);
    }
  }

  // Arrivals: explicitly scheduled ones first, then Poisson draws.
  for (auto& t : scheduled_) {
    t.arrival_time = double(now_);
    inbox_[static_cast<std::size_t>(t.origin)].push_back({t.id, 0});
    ++generated_;
    tasks_.emplace(t.id, std::move(t));
  }
  scheduled_.clear();
  for (AgentId g : config_.generators) {
    auto arrivals = generate_arrivals(std::span<const AgentId>(&g, 1), config_.arrival_rate,
                                      config_.service_rate, now_, runtime(g).arrival_rng,
                                      next_task_id_);
    for (auto& t : arrivals) {
      inbox_[static_cast<std::size_t>(g)].push_back({t.id, 0});
      ++generated_;
      tasks_.emplace(t.id, std::move(t));
    }
  }

  // Decisions for everything received this tick.
  for (AgentId id = 0; id < topology_.size(); ++id) {
    auto& box = inbox_[static_cast<std::size_t>(id)];
    for (const auto& in : box) dispatch(id, in.task, in.hop);
    box.clear();
  }

  for (const auto& u : updates) process_update(u);

  for (AgentId id = 0; id < topology_.size(); ++id) advance_execution(id);
}

void World::dispatch(AgentId agent, TaskId task_id, std::int32_t hop) {
  auto& task = tasks_.at(task_id);
  auto& rt = runtime(agent);
  if (static_cast<std::size_t>(hop) != task.hop_trail.size()) {
    throw std::logic_error("hop index out of sync with the task's trail");
  }

  ActionIndex action = kLocalAction;
  const bool capped = config_.max_hops > 0 && hop + 1 >= config_.max_hops;
  if (!capped) action = static_cast<ActionIndex>(sample(rt.learner.policy, rt.decision_rng));

  const Time receipt = double(now_);
  task.hop_trail.push_back({agent, receipt, action});
  action_counter_.record(agent, action);

  if (action == kLocalAction) {
    task.enqueue_time = receipt;
    rt.queue.push_back(task_id);
    return;
  }
  const AgentId upstream = hop > 0 ? task.hop_trail[static_cast<std::size_t>(hop - 1)].agent : -1;
  rt.pending.emplace(std::make_pair(task_id, hop), PendingHop{receipt, action, upstream});
  Message request;
  request.kind = MessageKind::kRequest;
  request.from = agent;
  request.to = topology_.action_target(agent, action);
  request.task = task_id;
  request.hop = hop + 1;
  send(request);
}

void World::observe(AgentId agent, TaskId task, std::int32_t hop, ActionIndex action,
                    double reward, Time r) {
  auto& learner = runtime(agent).learner;
  if (config_.learning) {
    learner = learner_observe(std::move(learner), action, reward, config_.learner);
  }
  if (on_reward_) on_reward_(RewardEvent{agent, task, hop, action, reward, r, now_});
}

void World::process_update(const Message& update) {
  auto& rt = runtime(update.to);
  const auto it = rt.pending.find({update.task, update.hop});
  if (it == rt.pending.end()) {
    throw std::logic_error("UPDATE for task " + std::to_string(update.task) +
                           " without a matching hop record");
  }
  const PendingHop hop = it->second;
  rt.pending.erase(it);

  // R measured from this agent's receipt: forward transit plus downstream R.
  const Time r = topology_.link_delay(update.to, update.from) + update.r;
  observe(update.to, update.task, update.hop, hop.action, -r, r);

  if (hop.upstream >= 0) {
    Message up;
    up.kind = MessageKind::kUpdate;
    up.from = update.to;
    up.to = hop.upstream;
    up.task = update.task;
    up.hop = update.hop - 1;
    up.r = r;
    send(up);
  }
}

void World::advance_execution(AgentId agent) {
  auto& rt = runtime(agent);
  while (true) {
    if (rt.running) {
      if (rt.busy_until > double(now_)) break;
      const TaskId done = *rt.running;
      rt.running.reset();
      complete(agent, tasks_.at(done));
      tasks_.erase(done);
    }
    if (rt.queue.empty()) break;
    const TaskId head = rt.queue.front();
    rt.queue.pop_front();
    auto& task = tasks_.at(head);
    task.start_time = std::max(task.enqueue_time, rt.busy_until);
    rt.busy_until = task.start_time + task.service_duration;
    rt.running = head;
  }
}

void World::complete(AgentId agent, Task& task) {
  if (task.hop_trail.back().agent != agent) {
    throw std::logic_error("task completed away from the last hop of its trail");
  }
  task.completion_time = task.start_time + task.service_duration;
  ++completed_;

  const auto hop = static_cast<std::int32_t>(task.hop_trail.size() - 1);
  const Time r = task.completion_time - task.hop_trail.back().receipt_time;
  observe(agent, task.id, hop, kLocalAction, -r, r);

  if (hop > 0) {
    Message up;
    up.kind = MessageKind::kUpdate;
    up.from = agent;
    up.to = task.hop_trail[static_cast<std::size_t>(hop - 1)].agent;
    up.task = task.id;
    up.hop = hop - 1;
    up.r = r;
    send(up);
  }
  if (on_completion_) on_completion_(task);
}

}  // namespace dtap
