#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tracecheck/graph.hpp"

namespace tracecheck {

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

const char* comparator_text(Comparator c);
bool compare(std::int64_t lhs, Comparator c, std::int64_t rhs);

struct Formula {
  enum class Op { True, False, Atom, Not, And, Or, EX, EF, EG, AX, AF, AG };

  Op op = Op::True;
  std::string var;  // Atom
  Comparator cmp = Comparator::Eq;
  std::int64_t value = 0;
  std::shared_ptr<const Formula> lhs;  // operand of unary operators
  std::shared_ptr<const Formula> rhs;
};

using FormulaPtr = std::shared_ptr<const Formula>;

FormulaPtr ctl_true();
FormulaPtr ctl_false();
FormulaPtr ctl_atom(std::string var, Comparator cmp, std::int64_t value);
FormulaPtr ctl_not(FormulaPtr f);
FormulaPtr ctl_and(FormulaPtr a, FormulaPtr b);
FormulaPtr ctl_or(FormulaPtr a, FormulaPtr b);
FormulaPtr ctl_unary(Formula::Op op, FormulaPtr f);  // EX .. AG, or Not

bool is_temporal(Formula::Op op);
const char* temporal_keyword(Formula::Op op);
bool formula_equal(const Formula& a, const Formula& b);
std::size_t formula_depth(const Formula& f);

// Dense membership set over the states of one graph.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t size, bool filled = false);

  std::size_t universe() const { return size_; }
  bool contains(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void insert(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void erase(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  std::size_t count() const;
  std::vector<std::size_t> members() const;

  StateSet& operator&=(const StateSet& o);
  StateSet& operator|=(const StateSet& o);
  StateSet complement() const;

  friend bool operator==(const StateSet&, const StateSet&) = default;
  bool subset_of(const StateSet& o) const;

 private:
  void trim();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Satisfaction set of f on g. Throws Error(Model) if an atom names a variable
// the graph does not have.
StateSet sat(const StateGraph& g, const Formula& f);

struct CheckResult {
  bool holds = false;
  // Populated when the property fails: one line per initial state naming the
  // first top-level conjunct it violates.
  std::vector<std::string> diagnostics;
};

// Existential verdict: holds iff some initial state satisfies f.
CheckResult holds_initially(const StateGraph& g, const Formula& f);

}  // namespace tracecheck
