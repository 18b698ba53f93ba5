#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tracecheck {

// Integer/boolean expression tree shared by guards, updates and the optional
// init constraint. Nodes are immutable once built and may be shared.
struct Expr {
  enum class Op { IntLit, BoolLit, Ident, Neg, Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not };
  static constexpr std::size_t kUnresolved = std::numeric_limits<std::size_t>::max();

  Op op = Op::IntLit;
  std::int64_t value = 0;              // IntLit / BoolLit (0 or 1)
  std::string name;                    // Ident
  std::size_t slot = kUnresolved;      // Ident: variable index, kUnresolved for constants
  std::shared_ptr<const Expr> lhs;     // unary operand or left operand
  std::shared_ptr<const Expr> rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprType { Int, Bool };

ExprPtr make_int(std::int64_t v);
ExprPtr make_bool(bool v);
ExprPtr make_ident(std::string name, std::size_t slot = Expr::kUnresolved);
ExprPtr make_unary(Expr::Op op, ExprPtr operand);
ExprPtr make_binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs);

bool is_comparison(Expr::Op op);
ExprType result_type(Expr::Op op);
bool expr_equal(const Expr& a, const Expr& b);

struct VarDecl {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t init = 0;

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

// One value per declared variable, in declaration order.
using Valuation = std::vector<std::int64_t>;

struct Assignment {
  std::string var;
  std::size_t slot = 0;
  ExprPtr value;
};

struct GuardedCommand {
  std::optional<std::string> label;  // actor/action label; carries no semantics
  ExprPtr guard;
  std::vector<Assignment> updates;
};

struct SystemModel {
  std::vector<std::pair<std::string, std::int64_t>> constants;
  std::vector<VarDecl> variables;
  ExprPtr init_constraint;  // optional; widens the initial set
  std::vector<GuardedCommand> commands;

  std::optional<std::size_t> variable_index(std::string_view name) const;
  std::optional<std::int64_t> constant(std::string_view name) const;
  Valuation initial_valuation() const;
};

bool model_equal(const SystemModel& a, const SystemModel& b);

// Checks the declared invariants: at least one variable, unique names,
// lo <= init <= hi, resolved identifiers, well-typed guards and updates,
// at most one assignment per variable per command. Throws Error(Model).
void check_model(const SystemModel& model);

// Evaluates an expression. Booleans are returned as 0/1. Throws Error(Model)
// on unknown identifiers or int64 overflow.
std::int64_t eval_expr(const Expr& expr, const SystemModel& model, const Valuation& v);

// Successor valuations of v: one per enabled command, updates applied
// simultaneously against v. Deduplicated and sorted lexicographically. When no
// command is enabled the result is {v}.
std::vector<Valuation> step(const SystemModel& model, const Valuation& v);

// Indices of commands whose guard holds under v.
std::vector<std::size_t> enabled_commands(const SystemModel& model, const Valuation& v);

}  // namespace tracecheck
