#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tracecheck/model.hpp"

namespace tracecheck {

using StateIndex = std::uint32_t;

inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

// Explicit Kripke structure. States are indexed in BFS discovery order;
// labeling is evaluated on demand from the stored valuations.
class StateGraph {
 public:
  StateGraph() = default;

  // Assembles a graph from explicit parts. Every state must have at least one
  // successor and every successor index must be in range; predecessor lists
  // are derived. Throws Error(InvalidArgument) otherwise.
  static StateGraph from_parts(std::vector<std::string> variables, std::vector<Valuation> states,
                               std::vector<StateIndex> initial, std::vector<std::vector<StateIndex>> succ);

  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Valuation>& states() const { return states_; }
  const std::vector<StateIndex>& initial() const { return initial_; }
  const std::vector<StateIndex>& successors(StateIndex s) const { return succ_[s]; }
  const std::vector<StateIndex>& predecessors(StateIndex s) const { return pred_[s]; }

  std::size_t state_count() const { return states_.size(); }
  std::size_t edge_count() const { return edges_; }

  friend bool operator==(const StateGraph& a, const StateGraph& b) {
    return a.variables_ == b.variables_ && a.states_ == b.states_ && a.initial_ == b.initial_ && a.succ_ == b.succ_;
  }

 private:
  std::vector<std::string> variables_;
  std::vector<Valuation> states_;
  std::vector<StateIndex> initial_;
  std::vector<std::vector<StateIndex>> succ_;
  std::vector<std::vector<StateIndex>> pred_;
  std::size_t edges_ = 0;
};

// All initial valuations: the declared init vector plus, when the model has an
// init constraint, every in-domain valuation satisfying it. Sorted, unique.
std::vector<Valuation> initial_valuations(const SystemModel& model, std::size_t max_states = kDefaultStateBudget);

// Breadth-first closure of step() from the initial valuations. Throws
// Error(StateExplosion) once more than max_states states are discovered.
StateGraph build_graph(const SystemModel& model, std::size_t max_states = kDefaultStateBudget);

}  // namespace tracecheck
