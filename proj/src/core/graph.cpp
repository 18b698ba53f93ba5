#include "tracecheck/graph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "tracecheck/error.hpp"

namespace tracecheck {

namespace {

struct ValuationHash {
  std::size_t operator()(const Valuation& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

[[noreturn]] void explode(std::size_t budget) {
  throw Error(ErrorKind::StateExplosion,
              "state explosion: more than " + std::to_string(budget) + " states");
}

}  // namespace

StateGraph StateGraph::from_parts(std::vector<std::string> variables, std::vector<Valuation> states,
                                  std::vector<StateIndex> initial, std::vector<std::vector<StateIndex>> succ) {
  if (succ.size() != states.size()) throw Error(ErrorKind::InvalidArgument, "successor table size mismatch");
  StateGraph g;
  g.pred_.resize(states.size());
  for (std::size_t s = 0; s < succ.size(); ++s) {
    auto& out = succ[s];
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "state " + std::to_string(s) + " has no successor");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (StateIndex t : out) {
      if (t >= states.size()) throw Error(ErrorKind::InvalidArgument, "successor index out of range");
      g.pred_[t].push_back(static_cast<StateIndex>(s));
    }
    g.edges_ += out.size();
  }
  for (StateIndex s : initial) {
    if (s >= states.size()) throw Error(ErrorKind::InvalidArgument, "initial index out of range");
  }
  std::sort(initial.begin(), initial.end());
  initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
  for (const auto& v : states) {
    if (v.size() != variables.size()) throw Error(ErrorKind::InvalidArgument, "valuation width mismatch");
  }
  g.variables_ = std::move(variables);
  g.states_ = std::move(states);
  g.initial_ = std::move(initial);
  g.succ_ = std::move(succ);
  return g;
}

std::vector<Valuation> initial_valuations(const SystemModel& model, std::size_t max_states) {
  std::vector<Valuation> out{model.initial_valuation()};
  if (model.init_constraint) {
    // Odometer over the full domain product.
    std::size_t visited = 0;
    Valuation v;
    for (const auto& var : model.variables) v.push_back(var.lo);
    while (true) {
      if (++visited > max_states) explode(max_states);
      if (eval_expr(*model.init_constraint, model, v) != 0) out.push_back(v);
      bool carry = true;
      for (std::size_t i = v.size(); carry && i > 0; --i) {
        if (v[i - 1] < model.variables[i - 1].hi) {
          ++v[i - 1];
          carry = false;
        } else {
          v[i - 1] = model.variables[i - 1].lo;
        }
      }
      if (carry) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StateGraph build_graph(const SystemModel& model, std::size_t max_states) {
  check_model(model);
  std::vector<std::string> names;
  for (const auto& var : model.variables) names.push_back(var.name);

  std::vector<Valuation> states;
  std::vector<std::vector<StateIndex>> succ;
  std::unordered_map<Valuation, StateIndex, ValuationHash> index;
  std::deque<StateIndex> frontier;

  auto intern = [&](const Valuation& v) -> StateIndex {
    auto [it, inserted] = index.try_emplace(v, static_cast<StateIndex>(states.size()));
    if (inserted) {
      if (states.size() >= max_states) explode(max_states);
      states.push_back(v);
      succ.emplace_back();
      frontier.push_back(it->second);
    }
    return it->second;
  };

  std::vector<StateIndex> initial;
  for (const auto& v : initial_valuations(model, max_states)) initial.push_back(intern(v));

  while (!frontier.empty()) {
    const StateIndex s = frontier.front();
    frontier.pop_front();
    const Valuation current = states[s];
    std::vector<StateIndex> out;
    for (const auto& next : step(model, current)) out.push_back(intern(next));
    succ[s] = std::move(out);
  }
  return StateGraph::from_parts(std::move(names), std::move(states), std::move(initial), std::move(succ));
}

}  // namespace tracecheck
