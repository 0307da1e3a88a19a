#ifndef DTAP_LEARNERS_HPP
#define DTAP_LEARNERS_HPP

#include "dtap/simplex.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtap {

enum class Algorithm { kWpl, kGigaWolf };

std::string_view to_string(Algorithm algorithm);
/// Accepts "wpl" and "giga-wolf" (case-insensitive); throws std::invalid_argument.
Algorithm parse_algorithm(std::string_view name);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::kWpl;
  double eta = 1e-7;
  double alpha = 0.1;
  double epsilon_floor = 0.01;

  /// Throws std::invalid_argument when the config is unusable for an
  /// agent with `num_actions` actions.
  void validate(Eigen::Index num_actions) const {
    if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
    if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (!(epsilon_floor >= 0) || epsilon_floor * double(num_actions) >= 1) {
      throw std::invalid_argument("epsilon_floor must lie in [0, 1/num_actions)");
    }
  }
};

/// Exponential moving average of the reward for one action.
template <typename Scalar>
Vector<Scalar> update_value(Vector<Scalar> q, Eigen::Index action, Scalar reward,
                            Scalar alpha) {
  if (action < 0 || action >= q.size()) throw std::out_of_range("action out of range");
  if (!std::isfinite(reward)) throw std::invalid_argument("reward must be finite");
  q[action] = (1 - alpha) * q[action] + alpha * reward;
  return q;
}

/// Advantage of each action over the current mixture: q[j] - <p, q>.
///
/// For a single-state agent V(p) = <p, q>, so this is the gradient of V
/// restricted to the simplex tangent space (it satisfies <p, g> = 0).
template <typename Scalar>
Vector<Scalar> gradient(const Vector<Scalar>& q, const BasicPolicy<Scalar>& p) {
  if (q.size() != p.size()) throw std::invalid_argument("value/policy length mismatch");
  const Scalar baseline = p.probs().dot(q);
  return (q.array() - baseline).matrix();
}

/// Pre-projection WPL step: g[j] * eta * (p[j] if g[j] < 0 else 1 - p[j]).
template <typename Scalar>
Vector<Scalar> wpl_delta(const BasicPolicy<Scalar>& p, const Vector<Scalar>& g, Scalar eta) {
  if (g.size() != p.size()) throw std::invalid_argument("gradient/policy length mismatch");
  const auto probs = p.probs().array();
  return (g.array() * eta * (g.array() < 0).select(probs, 1 - probs)).matrix();
}

template <typename Scalar>
BasicPolicy<Scalar> wpl_step(const BasicPolicy<Scalar>& p, const Vector<Scalar>& g,
                             const LearnerConfig& cfg) {
  if (!g.allFinite()) throw std::invalid_argument("gradient must be finite");
  return project_to_simplex(p.probs() + wpl_delta(p, g, Scalar(cfg.eta)),
                            Scalar(cfg.epsilon_floor));
}

template <typename Scalar>
struct GigaWolfResult {
  BasicPolicy<Scalar> policy;  // x-hat + delta * (z' - x-hat)
  BasicPolicy<Scalar> z;       // new slow baseline z'
  BasicPolicy<Scalar> fast;    // x-hat
  Scalar delta;
};

/// One GIGA-WoLF update. The fast track takes the full eta step, the slow
/// track a third of it, and the output is pulled from the fast point toward
/// the slow one by delta = min(1, |z' - z| / |z' - x-hat|).
template <typename Scalar>
GigaWolfResult<Scalar> giga_wolf_step(const BasicPolicy<Scalar>& p,
                                      const BasicPolicy<Scalar>& z,
                                      const Vector<Scalar>& g,
                                      const LearnerConfig& cfg) {
  if (g.size() != p.size() || z.size() != p.size()) {
    throw std::invalid_argument("gradient/policy length mismatch");
  }
  if (!g.allFinite()) throw std::invalid_argument("gradient must be finite");
  const Scalar eta = Scalar(cfg.eta);
  const Scalar floor = Scalar(cfg.epsilon_floor);

  auto fast = project_to_simplex(p.probs() + eta * g, floor);
  auto slow = project_to_simplex(p.probs() + (eta / 3) * g, floor);

  const Scalar gap = (slow.probs() - fast.probs()).norm();
  const Scalar delta =
      gap <= Scalar(1e-12) ? Scalar(1)
                           : std::min(Scalar(1), (slow.probs() - z.probs()).norm() / gap);

  Vector<Scalar> mixed = fast.probs() + delta * (slow.probs() - fast.probs());
  return {BasicPolicy<Scalar>(std::move(mixed)), std::move(slow), std::move(fast), delta};
}

/// Everything one agent's learner carries between rewards.
template <typename Scalar>
struct BasicLearnerState {
  BasicPolicy<Scalar> policy;
  Vector<Scalar> q;
  BasicPolicy<Scalar> z;  // GIGA-WoLF baseline; tracks `policy` under WPL

  static BasicLearnerState initial(Eigen::Index num_actions, const LearnerConfig& cfg) {
    cfg.validate(num_actions);
    auto start = BasicPolicy<Scalar>::uniform(num_actions);
    return {start, Vector<Scalar>::Zero(num_actions), start};
  }
};

using LearnerState = BasicLearnerState<double>;

/// Folds one reward into the value estimate and applies exactly one policy
/// update of the configured algorithm.
template <typename Scalar>
BasicLearnerState<Scalar> learner_observe(BasicLearnerState<Scalar> state,
                                          Eigen::Index action, Scalar reward,
                                          const LearnerConfig& cfg) {
  state.q = update_value(std::move(state.q), action, reward, Scalar(cfg.alpha));
  const Vector<Scalar> g = gradient(state.q, state.policy);
  switch (cfg.algorithm) {
    case Algorithm::kWpl:
      state.policy = wpl_step(state.policy, g, cfg);
      state.z = state.policy;
      break;
    case Algorithm::kGigaWolf: {
      auto step = giga_wolf_step(state.policy, state.z, g, cfg);
      state.policy = std::move(step.policy);
      state.z = std::move(step.z);
      break;
    }
  }
  return state;
}

}  // namespace dtap

#endif  // DTAP_LEARNERS_HPP
