#include "tracecheck/ctl.hpp"

#include <algorithm>
#include <bit>
#include <deque>

#include "tracecheck/error.hpp"
#include "tracecheck/lang.hpp"

namespace tracecheck {

const char* comparator_text(Comparator c) {
  switch (c) {
    case Comparator::Eq: return "==";
    case Comparator::Ne: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "?";
}

bool compare(std::int64_t lhs, Comparator c, std::int64_t rhs) {
  switch (c) {
    case Comparator::Eq: return lhs == rhs;
    case Comparator::Ne: return lhs != rhs;
    case Comparator::Lt: return lhs < rhs;
    case Comparator::Le: return lhs <= rhs;
    case Comparator::Gt: return lhs > rhs;
    case Comparator::Ge: return lhs >= rhs;
  }
  return false;
}

namespace {

FormulaPtr make(Formula::Op op, FormulaPtr lhs = nullptr, FormulaPtr rhs = nullptr) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

}  // namespace

FormulaPtr ctl_true() { return make(Formula::Op::True); }
FormulaPtr ctl_false() { return make(Formula::Op::False); }

FormulaPtr ctl_atom(std::string var, Comparator cmp, std::int64_t value) {
  auto f = std::make_shared<Formula>();
  f->op = Formula::Op::Atom;
  f->var = std::move(var);
  f->cmp = cmp;
  f->value = value;
  return f;
}

FormulaPtr ctl_not(FormulaPtr f) { return make(Formula::Op::Not, std::move(f)); }
FormulaPtr ctl_and(FormulaPtr a, FormulaPtr b) { return make(Formula::Op::And, std::move(a), std::move(b)); }
FormulaPtr ctl_or(FormulaPtr a, FormulaPtr b) { return make(Formula::Op::Or, std::move(a), std::move(b)); }

FormulaPtr ctl_unary(Formula::Op op, FormulaPtr f) {
  if (!is_temporal(op) && op != Formula::Op::Not) {
    throw Error(ErrorKind::InvalidArgument, "ctl_unary expects a unary operator");
  }
  return make(op, std::move(f));
}

bool is_temporal(Formula::Op op) {
  switch (op) {
    case Formula::Op::EX:
    case Formula::Op::EF:
    case Formula::Op::EG:
    case Formula::Op::AX:
    case Formula::Op::AF:
    case Formula::Op::AG:
      return true;
    default:
      return false;
  }
}

const char* temporal_keyword(Formula::Op op) {
  switch (op) {
    case Formula::Op::EX: return "EX";
    case Formula::Op::EF: return "EF";
    case Formula::Op::EG: return "EG";
    case Formula::Op::AX: return "AX";
    case Formula::Op::AF: return "AF";
    case Formula::Op::AG: return "AG";
    default: return "";
  }
}

bool formula_equal(const Formula& a, const Formula& b) {
  if (a.op != b.op) return false;
  if (a.op == Formula::Op::Atom) return a.var == b.var && a.cmp == b.cmp && a.value == b.value;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !formula_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !formula_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

std::size_t formula_depth(const Formula& f) {
  std::size_t d = 0;
  if (f.lhs) d = std::max(d, formula_depth(*f.lhs));
  if (f.rhs) d = std::max(d, formula_depth(*f.rhs));
  return d + 1;
}

StateSet::StateSet(std::size_t size, bool filled)
    : size_(size), words_((size + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
  trim();
}

void StateSet::trim() {
  if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
}

std::size_t StateSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> StateSet::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

StateSet& StateSet::operator&=(const StateSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

StateSet& StateSet::operator|=(const StateSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

StateSet StateSet::complement() const {
  StateSet out = *this;
  for (auto& w : out.words_) w = ~w;
  out.trim();
  return out;
}

bool StateSet::subset_of(const StateSet& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~o.words_[i]) return false;
  }
  return true;
}

namespace {

StateSet pre_exists(const StateGraph& g, const StateSet& target) {
  StateSet out(g.state_count());
  for (std::size_t t : target.members()) {
    for (StateIndex p : g.predecessors(static_cast<StateIndex>(t))) out.insert(p);
  }
  return out;
}

// Least fixpoint Z = target ∪ EX Z, as a backward search.
StateSet exists_finally(const StateGraph& g, StateSet target) {
  std::deque<std::size_t> work;
  for (std::size_t s : target.members()) work.push_back(s);
  while (!work.empty()) {
    const auto s = static_cast<StateIndex>(work.front());
    work.pop_front();
    for (StateIndex p : g.predecessors(s)) {
      if (!target.contains(p)) {
        target.insert(p);
        work.push_back(p);
      }
    }
  }
  return target;
}

// Greatest fixpoint Z = target ∩ EX Z: repeatedly drop states whose
// successors have all left Z.
StateSet exists_globally(const StateGraph& g, StateSet z) {
  std::vector<std::uint32_t> live(g.state_count(), 0);
  std::deque<StateIndex> work;
  for (std::size_t s : z.members()) {
    for (StateIndex t : g.successors(static_cast<StateIndex>(s))) {
      if (z.contains(t)) ++live[s];
    }
    if (live[s] == 0) work.push_back(static_cast<StateIndex>(s));
  }
  while (!work.empty()) {
    const StateIndex s = work.front();
    work.pop_front();
    if (!z.contains(s)) continue;
    z.erase(s);
    for (StateIndex p : g.predecessors(s)) {
      if (z.contains(p) && --live[p] == 0) work.push_back(p);
    }
  }
  return z;
}

std::size_t variable_slot(const StateGraph& g, const std::string& name) {
  const auto& vars = g.variables();
  auto it = std::find(vars.begin(), vars.end(), name);
  if (it == vars.end()) throw Error(ErrorKind::Model, "formula references unknown variable '" + name + "'");
  return static_cast<std::size_t>(it - vars.begin());
}

}  // namespace

StateSet sat(const StateGraph& g, const Formula& f) {
  const std::size_t n = g.state_count();
  using Op = Formula::Op;
  switch (f.op) {
    case Op::True:
      return StateSet(n, true);
    case Op::False:
      return StateSet(n);
    case Op::Atom: {
      const std::size_t slot = variable_slot(g, f.var);
      StateSet out(n);
      for (std::size_t s = 0; s < n; ++s) {
        if (compare(g.states()[s][slot], f.cmp, f.value)) out.insert(s);
      }
      return out;
    }
    case Op::Not:
      return sat(g, *f.lhs).complement();
    case Op::And: {
      StateSet out = sat(g, *f.lhs);
      out &= sat(g, *f.rhs);
      return out;
    }
    case Op::Or: {
      StateSet out = sat(g, *f.lhs);
      out |= sat(g, *f.rhs);
      return out;
    }
    case Op::EX:
      return pre_exists(g, sat(g, *f.lhs));
    case Op::EF:
      return exists_finally(g, sat(g, *f.lhs));
    case Op::EG:
      return exists_globally(g, sat(g, *f.lhs));
    case Op::AX:
      return pre_exists(g, sat(g, *f.lhs).complement()).complement();
    case Op::AF:
      return exists_globally(g, sat(g, *f.lhs).complement()).complement();
    case Op::AG:
      return exists_finally(g, sat(g, *f.lhs).complement()).complement();
  }
  throw Error(ErrorKind::InvalidArgument, "malformed formula");
}

namespace {

void flatten_and(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->op == Formula::Op::And) {
    flatten_and(f->lhs, out);
    flatten_and(f->rhs, out);
  } else {
    out.push_back(f);
  }
}

std::string describe(const StateGraph& g, StateIndex s) {
  std::string out = "s" + std::to_string(s) + " {";
  for (std::size_t i = 0; i < g.variables().size(); ++i) {
    if (i) out += ", ";
    out += g.variables()[i] + "=" + std::to_string(g.states()[s][i]);
  }
  return out + "}";
}

}  // namespace

CheckResult holds_initially(const StateGraph& g, const Formula& f) {
  CheckResult result;
  const StateSet satisfied = sat(g, f);
  for (StateIndex s : g.initial()) {
    if (satisfied.contains(s)) {
      result.holds = true;
      return result;
    }
  }
  // Best-effort diagnostic: the first top-level conjunct each initial state violates.
  std::vector<FormulaPtr> conjuncts;
  flatten_and(std::make_shared<Formula>(f), conjuncts);
  std::vector<StateSet> conjunct_sets;
  for (const auto& c : conjuncts) conjunct_sets.push_back(sat(g, *c));
  for (StateIndex s : g.initial()) {
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      if (!conjunct_sets[i].contains(s)) {
        std::string text = print_formula(*conjuncts[i]);
        if (text.size() > 120) text = text.substr(0, 117) + "...";
        result.diagnostics.push_back(describe(g, s) + " violates conjunct " + std::to_string(i + 1) + ": " + text);
        break;
      }
    }
  }
  return result;
}

}  // namespace tracecheck
