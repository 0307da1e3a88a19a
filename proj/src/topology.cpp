#include "dtap/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dtap {

GridTopology::GridTopology(int rows, int cols, int adjacent_delay)
    : rows_(rows), cols_(cols), adjacent_delay_(adjacent_delay) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (adjacent_delay < 1) throw std::invalid_argument("adjacent_delay must be >= 1");
  neighbors_.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      auto& list = neighbors_[static_cast<std::size_t>(agent_at(r, c))];
      // Row-major ids: up < left < right < down.
      if (r > 0) list.push_back(agent_at(r - 1, c));
      if (c > 0) list.push_back(agent_at(r, c - 1));
      if (c + 1 < cols) list.push_back(agent_at(r, c + 1));
      if (r + 1 < rows) list.push_back(agent_at(r + 1, c));
    }
  }
}

GridPosition GridTopology::position(AgentId agent) const {
  if (agent < 0 || agent >= size()) throw std::out_of_range("agent id out of range");
  return {agent / cols_, agent % cols_};
}

AgentId GridTopology::agent_at(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw std::out_of_range("grid position out of range");
  }
  return static_cast<AgentId>(row * cols_ + col);
}

std::span<const AgentId> GridTopology::neighbors(AgentId agent) const {
  if (agent < 0 || agent >= size()) throw std::out_of_range("agent id out of range");
  return neighbors_[static_cast<std::size_t>(agent)];
}

bool GridTopology::adjacent(AgentId a, AgentId b) const {
  const auto list = neighbors(a);
  return std::binary_search(list.begin(), list.end(), b);
}

double GridTopology::distance_delay(AgentId a, AgentId b) const {
  const auto pa = position(a);
  const auto pb = position(b);
  return adjacent_delay_ * std::hypot(double(pa.row - pb.row), double(pa.col - pb.col));
}

int GridTopology::link_delay(AgentId a, AgentId b) const {
  if (!adjacent(a, b)) {
    throw std::invalid_argument("agents " + std::to_string(a) + " and " +
                                std::to_string(b) + " are not adjacent");
  }
  return adjacent_delay_;
}

int GridTopology::action_count(AgentId agent) const {
  return static_cast<int>(neighbors(agent).size()) + 1;
}

AgentId GridTopology::action_target(AgentId agent, ActionIndex action) const {
  const auto list = neighbors(agent);
  if (action == kLocalAction) return agent;
  if (action < 0 || static_cast<std::size_t>(action) > list.size()) {
    throw std::out_of_range("action index out of range");
  }
  return list[static_cast<std::size_t>(action - 1)];
}

ActionIndex GridTopology::action_for(AgentId agent, AgentId neighbor) const {
  const auto list = neighbors(agent);
  const auto it = std::lower_bound(list.begin(), list.end(), neighbor);
  if (it == list.end() || *it != neighbor) {
    throw std::invalid_argument("not a neighbor");
  }
  return static_cast<ActionIndex>(it - list.begin()) + 1;
}

std::vector<AgentId> GridTopology::center_region(int region_rows, int region_cols) const {
  if (region_rows < 0 || region_cols < 0 || region_rows > rows_ || region_cols > cols_) {
    throw std::invalid_argument("generator region " + std::to_string(region_rows) + "x" +
                                std::to_string(region_cols) + " does not fit in a " +
                                std::to_string(rows_) + "x" + std::to_string(cols_) +
                                " grid");
  }
  if ((rows_ - region_rows) % 2 != 0 || (cols_ - region_cols) % 2 != 0) {
    throw std::invalid_argument("generator region cannot be centered in the grid");
  }
  const int top = (rows_ - region_rows) / 2;
  const int left = (cols_ - region_cols) / 2;
  std::vector<AgentId> ids;
  for (int r = top; r < top + region_rows; ++r) {
    for (int c = left; c < left + region_cols; ++c) ids.push_back(agent_at(r, c));
  }
  return ids;
}

GridTopology build_grid(int rows, int cols, int adjacent_delay) {
  return GridTopology(rows, cols, adjacent_delay);
}

}  // namespace dtap
