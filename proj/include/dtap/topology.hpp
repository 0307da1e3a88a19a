#ifndef DTAP_TOPOLOGY_HPP
#define DTAP_TOPOLOGY_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace dtap {

using AgentId = std::int32_t;
/// Index into an agent's action set: 0 is local execution, k >= 1 forwards
/// to neighbors()[k - 1].
using ActionIndex = std::int32_t;

inline constexpr ActionIndex kLocalAction = 0;

struct GridPosition {
  int row = 0;
  int col = 0;
};

/// Rectangular grid of agents with 4-neighborhood links. Agent ids are
/// row-major; neighbor lists are sorted by id.
class GridTopology {
 public:
  GridTopology(int rows, int cols, int adjacent_delay);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int adjacent_delay() const noexcept { return adjacent_delay_; }
  AgentId size() const noexcept { return static_cast<AgentId>(neighbors_.size()); }

  GridPosition position(AgentId agent) const;
  AgentId agent_at(int row, int col) const;

  std::span<const AgentId> neighbors(AgentId agent) const;
  bool adjacent(AgentId a, AgentId b) const;

  /// adjacent_delay times the Euclidean grid distance.
  double distance_delay(AgentId a, AgentId b) const;
  /// Integral transit time of a link; throws unless a and b are adjacent.
  int link_delay(AgentId a, AgentId b) const;

  int action_count(AgentId agent) const;
  /// The agent that executes or receives the task under `action`.
  AgentId action_target(AgentId agent, ActionIndex action) const;
  /// Inverse of action_target for a neighbor; throws if not adjacent.
  ActionIndex action_for(AgentId agent, AgentId neighbor) const;

  /// Agents in the centered sub-grid of the given size, ascending id.
  /// Throws std::invalid_argument if the region does not fit or cannot be
  /// centered (parity of the region must match the grid's).
  std::vector<AgentId> center_region(int region_rows, int region_cols) const;

 private:
  int rows_;
  int cols_;
  int adjacent_delay_;
  std::vector<std::vector<AgentId>> neighbors_;
};

/// Throws std::invalid_argument for non-positive dimensions or delay.
GridTopology build_grid(int rows, int cols, int adjacent_delay);

}  // namespace dtap

#endif  // DTAP_TOPOLOGY_HPP
