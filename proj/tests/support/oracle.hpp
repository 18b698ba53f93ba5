// Test-only helpers: an independent CTL evaluator and random generators.
//
// The evaluator deliberately shares nothing with the production checker.  It
// works per state with explicit path reasoning instead of fixpoints over sets,
// and evaluates every operator from its path definition (no duals):
//   EX  some successor satisfies the operand
//   AX  every successor satisfies the operand
//   EF  depth-first search for a reachable operand state
//   AG  depth-first search that every reachable state satisfies the operand
//   EG  lasso search: some operand-only path from s reaches a cycle
//   AF  no operand-avoiding path from s reaches a cycle (every path must hit
//       the operand because the graph is finite and total)
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tracecheck/ctl.hpp"
#include "tracecheck/graph.hpp"

namespace tctest {

using tracecheck::Comparator;
using tracecheck::Formula;
using tracecheck::FormulaPtr;
using tracecheck::StateGraph;
using tracecheck::StateIndex;

class NaiveChecker {
 public:
  explicit NaiveChecker(const StateGraph& g) : g_(g), n_(g.state_count()) {}

  // One bool per state.
  std::vector<bool> eval(const Formula& f) {
    auto it = memo_.find(&f);
    if (it != memo_.end()) return it->second;
    std::vector<bool> out(n_, false);
    using Op = Formula::Op;
    switch (f.op) {
      case Op::True:
        out.assign(n_, true);
        break;
      case Op::False:
        break;
      case Op::Atom: {
        std::size_t col = column(f.var);
        for (std::size_t s = 0; s < n_; ++s) {
          out[s] = tracecheck::compare(g_.states()[s][col], f.cmp, f.value);
        }
        break;
      }
      case Op::Not: {
        auto a = eval(*f.lhs);
        for (std::size_t s = 0; s < n_; ++s) out[s] = !a[s];
        break;
      }
      case Op::And:
      case Op::Or: {
        auto a = eval(*f.lhs);
        auto b = eval(*f.rhs);
        for (std::size_t s = 0; s < n_; ++s) out[s] = f.op == Op::And ? (a[s] && b[s]) : (a[s] || b[s]);
        break;
      }
      case Op::EX:
      case Op::AX: {
        auto a = eval(*f.lhs);
        for (std::size_t s = 0; s < n_; ++s) {
          bool any = false;
          bool all = true;
          for (StateIndex t : g_.successors(static_cast<StateIndex>(s))) {
            any = any || a[t];
            all = all && a[t];
          }
          out[s] = f.op == Op::EX ? any : all;
        }
        break;
      }
      case Op::EF: {
        auto a = eval(*f.lhs);
        for (std::size_t s = 0; s < n_; ++s) out[s] = reaches(s, a, [](std::size_t) { return true; });
        break;
      }
      case Op::AG: {
        auto a = eval(*f.lhs);
        std::vector<bool> bad(n_);
        for (std::size_t s = 0; s < n_; ++s) bad[s] = !a[s];
        for (std::size_t s = 0; s < n_; ++s) out[s] = !reaches(s, bad, [](std::size_t) { return true; });
        break;
      }
      case Op::EG: {
        auto a = eval(*f.lhs);
        for (std::size_t s = 0; s < n_; ++s) out[s] = a[s] && lasso(s, a);
        break;
      }
      case Op::AF: {
        auto a = eval(*f.lhs);
        std::vector<bool> avoid(n_);
        for (std::size_t s = 0; s < n_; ++s) avoid[s] = !a[s];
        for (std::size_t s = 0; s < n_; ++s) out[s] = a[s] || !lasso(s, avoid);
        break;
      }
    }
    memo_.emplace(&f, out);
    return out;
  }

 private:
  std::size_t column(const std::string& var) const {
    for (std::size_t i = 0; i < g_.variables().size(); ++i) {
      if (g_.variables()[i] == var) return i;
    }
    throw std::runtime_error("oracle: unknown variable " + var);
  }

  // Is some target state reachable from s (s included)?
  template <class Pass>
  bool reaches(std::size_t s, const std::vector<bool>& target, Pass pass) const {
    std::vector<bool> seen(n_, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      if (target[u]) return true;
      if (!pass(u)) continue;
      for (StateIndex t : g_.successors(static_cast<StateIndex>(u))) {
        if (!seen[t]) {
          seen[t] = true;
          stack.push_back(t);
        }
      }
    }
    return false;
  }

  // Is there an infinite path from s staying inside `inside`?  In a finite
  // graph that is a path into a cycle; found as a back edge of a recursive DFS.
  bool lasso(std::size_t s, const std::vector<bool>& inside) const {
    if (!inside[s]) return false;
    std::vector<int> colour(n_, 0);  // 0 new, 1 on stack, 2 done
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
      colour[u] = 1;
      for (StateIndex t : g_.successors(static_cast<StateIndex>(u))) {
        if (!inside[t]) continue;
        if (colour[t] == 1) return true;
        if (colour[t] == 0 && dfs(t)) return true;
      }
      colour[u] = 2;
      return false;
    };
    return dfs(s);
  }

  const StateGraph& g_;
  std::size_t n_;
  std::map<const Formula*, std::vector<bool>> memo_;
};

// ---------------------------------------------------------------------------
// Random generators

inline StateGraph random_graph(std::mt19937_64& rng, std::size_t max_states = 64, std::size_t max_out = 4) {
  std::uniform_int_distribution<std::size_t> nstates(1, max_states);
  std::uniform_int_distribution<std::size_t> nout(1, max_out);
  std::uniform_int_distribution<std::int64_t> value(0, 3);
  const std::size_t n = nstates(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<tracecheck::Valuation> states(n);
  std::vector<std::vector<StateIndex>> succ(n);
  for (std::size_t s = 0; s < n; ++s) {
    states[s] = {value(rng), value(rng)};
    std::size_t k = nout(rng);
    for (std::size_t e = 0; e < k; ++e) succ[s].push_back(static_cast<StateIndex>(pick(rng)));
  }
  std::vector<StateIndex> initial{static_cast<StateIndex>(pick(rng))};
  if (rng() % 3 == 0) initial.push_back(static_cast<StateIndex>(pick(rng)));
  return StateGraph::from_parts({"x", "y"}, std::move(states), std::move(initial), std::move(succ));
}

inline FormulaPtr random_formula(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars = {"x", "y"}) {
  using Op = Formula::Op;
  auto r = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  if (depth <= 1 || r(5) == 0) {
    int leaf = r(10);
    if (leaf == 0) return tracecheck::ctl_true();
    if (leaf == 1) return tracecheck::ctl_false();
    return tracecheck::ctl_atom(vars[static_cast<std::size_t>(r(static_cast<int>(vars.size())))],
                                static_cast<Comparator>(r(6)), r(6) - 1);
  }
  static constexpr Op kUnary[] = {Op::Not, Op::EX, Op::EF, Op::EG, Op::AX, Op::AF, Op::AG};
  int pick = r(9);
  if (pick < 7) return tracecheck::ctl_unary(kUnary[pick], random_formula(rng, depth - 1, vars));
  auto a = random_formula(rng, depth - 1, vars);
  auto b = random_formula(rng, depth - 1, vars);
  return pick == 7 ? tracecheck::ctl_and(a, b) : tracecheck::ctl_or(a, b);
}

inline tracecheck::StateSet to_set(const std::vector<bool>& v) {
  tracecheck::StateSet s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) s.insert(i);
  }
  return s;
}

}  // namespace tctest
