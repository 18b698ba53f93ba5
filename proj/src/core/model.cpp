#include "tracecheck/model.hpp"

#include <algorithm>
#include <set>

#include "tracecheck/error.hpp"

namespace tracecheck {

ExprPtr make_int(std::int64_t v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::IntLit;
  e->value = v;
  return e;
}

ExprPtr make_bool(bool v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::BoolLit;
  e->value = v ? 1 : 0;
  return e;
}

ExprPtr make_ident(std::string name, std::size_t slot) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Ident;
  e->name = std::move(name);
  e->slot = slot;
  return e;
}

ExprPtr make_unary(Expr::Op op, ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(operand);
  return e;
}

ExprPtr make_binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

bool is_comparison(Expr::Op op) {
  switch (op) {
    case Expr::Op::Eq:
    case Expr::Op::Ne:
    case Expr::Op::Lt:
    case Expr::Op::Le:
    case Expr::Op::Gt:
    case Expr::Op::Ge:
      return true;
    default:
      return false;
  }
}

ExprType result_type(Expr::Op op) {
  switch (op) {
    case Expr::Op::IntLit:
    case Expr::Op::Ident:
    case Expr::Op::Neg:
    case Expr::Op::Add:
    case Expr::Op::Sub:
    case Expr::Op::Mul:
      return ExprType::Int;
    default:
      return ExprType::Bool;
  }
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Expr::Op::IntLit:
    case Expr::Op::BoolLit:
      return a.value == b.value;
    case Expr::Op::Ident:
      return a.name == b.name;
    default:
      break;
  }
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !expr_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !expr_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

std::optional<std::size_t> SystemModel::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::int64_t> SystemModel::constant(std::string_view name) const {
  for (const auto& [key, value] : constants) {
    if (key == name) return value;
  }
  return std::nullopt;
}

Valuation SystemModel::initial_valuation() const {
  Valuation v;
  v.reserve(variables.size());
  for (const auto& var : variables) v.push_back(var.init);
  return v;
}

bool model_equal(const SystemModel& a, const SystemModel& b) {
  if (a.constants != b.constants || a.variables != b.variables) return false;
  if (static_cast<bool>(a.init_constraint) != static_cast<bool>(b.init_constraint)) return false;
  if (a.init_constraint && !expr_equal(*a.init_constraint, *b.init_constraint)) return false;
  if (a.commands.size() != b.commands.size()) return false;
  for (std::size_t i = 0; i < a.commands.size(); ++i) {
    const auto& ca = a.commands[i];
    const auto& cb = b.commands[i];
    if (ca.label != cb.label || !expr_equal(*ca.guard, *cb.guard)) return false;
    if (ca.updates.size() != cb.updates.size()) return false;
    for (std::size_t j = 0; j < ca.updates.size(); ++j) {
      if (ca.updates[j].var != cb.updates[j].var) return false;
      if (!expr_equal(*ca.updates[j].value, *cb.updates[j].value)) return false;
    }
  }
  return true;
}

namespace {

[[noreturn]] void model_error(const std::string& msg) { throw Error(ErrorKind::Model, msg); }

ExprType check_expr(const Expr& e, const SystemModel& m, const std::string& where) {
  switch (e.op) {
    case Expr::Op::IntLit:
      return ExprType::Int;
    case Expr::Op::BoolLit:
      return ExprType::Bool;
    case Expr::Op::Ident:
      if (e.slot != Expr::kUnresolved) {
        if (e.slot >= m.variables.size() || m.variables[e.slot].name != e.name) {
          model_error(where + ": identifier '" + e.name + "' bound to the wrong variable slot");
        }
      } else if (!m.constant(e.name)) {
        model_error(where + ": unknown identifier '" + e.name + "'");
      }
      return ExprType::Int;
    case Expr::Op::Neg:
      if (check_expr(*e.lhs, m, where) != ExprType::Int) model_error(where + ": '-' applied to a boolean");
      return ExprType::Int;
    case Expr::Op::Not:
      if (check_expr(*e.lhs, m, where) != ExprType::Bool) model_error(where + ": '!' applied to an integer");
      return ExprType::Bool;
    default:
      break;
  }
  const ExprType lt = check_expr(*e.lhs, m, where);
  const ExprType rt = check_expr(*e.rhs, m, where);
  if (e.op == Expr::Op::And || e.op == Expr::Op::Or) {
    if (lt != ExprType::Bool || rt != ExprType::Bool) model_error(where + ": boolean connective over integers");
    return ExprType::Bool;
  }
  if (lt != ExprType::Int || rt != ExprType::Int) model_error(where + ": arithmetic or comparison over booleans");
  return result_type(e.op);
}

// Takes the result by reference: the overflow builtin must run before the
// result is read, and argument evaluation order is unspecified.
std::int64_t checked(bool overflow, const std::int64_t& r) {
  if (overflow) model_error("arithmetic overflow");
  return r;
}

}  // namespace

void check_model(const SystemModel& model) {
  if (model.variables.empty()) model_error("model declares no variables");
  std::set<std::string> names;
  for (const auto& [name, value] : model.constants) {
    if (!names.insert(name).second) model_error("duplicate declaration of '" + name + "'");
  }
  for (const auto& var : model.variables) {
    if (!names.insert(var.name).second) model_error("duplicate declaration of '" + var.name + "'");
    if (var.lo > var.hi) model_error("empty domain for variable '" + var.name + "'");
    if (var.init < var.lo || var.init > var.hi) model_error("init out of bounds for variable '" + var.name + "'");
  }
  if (model.init_constraint && check_expr(*model.init_constraint, model, "init") != ExprType::Bool) {
    model_error("init constraint must be boolean");
  }
  for (std::size_t i = 0; i < model.commands.size(); ++i) {
    const auto& cmd = model.commands[i];
    const std::string where = "command " + std::to_string(i + 1);
    if (!cmd.guard || check_expr(*cmd.guard, model, where) != ExprType::Bool) {
      model_error(where + ": guard must be boolean");
    }
    std::set<std::string> assigned;
    for (const auto& upd : cmd.updates) {
      auto idx = model.variable_index(upd.var);
      if (!idx || *idx != upd.slot) model_error(where + ": update of unknown variable '" + upd.var + "'");
      if (!assigned.insert(upd.var).second) model_error(where + ": variable '" + upd.var + "' updated twice");
      if (!upd.value || check_expr(*upd.value, model, where) != ExprType::Int) {
        model_error(where + ": update of '" + upd.var + "' must be an integer expression");
      }
    }
  }
}

std::int64_t eval_expr(const Expr& e, const SystemModel& m, const Valuation& v) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::IntLit:
    case Op::BoolLit:
      return e.value;
    case Op::Ident:
      if (e.slot != Expr::kUnresolved) return v.at(e.slot);
      if (auto c = m.constant(e.name)) return *c;
      if (auto idx = m.variable_index(e.name)) return v.at(*idx);
      model_error("unknown identifier '" + e.name + "'");
    case Op::Neg: {
      std::int64_t r = 0;
      return checked(__builtin_sub_overflow(std::int64_t{0}, eval_expr(*e.lhs, m, v), &r), r);
    }
    case Op::Not:
      return eval_expr(*e.lhs, m, v) == 0 ? 1 : 0;
    case Op::And:
      return (eval_expr(*e.lhs, m, v) != 0 && eval_expr(*e.rhs, m, v) != 0) ? 1 : 0;
    case Op::Or:
      return (eval_expr(*e.lhs, m, v) != 0 || eval_expr(*e.rhs, m, v) != 0) ? 1 : 0;
    default:
      break;
  }
  const std::int64_t a = eval_expr(*e.lhs, m, v);
  const std::int64_t b = eval_expr(*e.rhs, m, v);
  std::int64_t r = 0;
  switch (e.op) {
    case Op::Add: return checked(__builtin_add_overflow(a, b, &r), r);
    case Op::Sub: return checked(__builtin_sub_overflow(a, b, &r), r);
    case Op::Mul: return checked(__builtin_mul_overflow(a, b, &r), r);
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    default:
      model_error("malformed expression");
  }
}

std::vector<std::size_t> enabled_commands(const SystemModel& model, const Valuation& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.commands.size(); ++i) {
    if (eval_expr(*model.commands[i].guard, model, v) != 0) out.push_back(i);
  }
  return out;
}

std::vector<Valuation> step(const SystemModel& model, const Valuation& v) {
  std::vector<Valuation> out;
  for (std::size_t i : enabled_commands(model, v)) {
    const auto& cmd = model.commands[i];
    Valuation next = v;
    for (const auto& upd : cmd.updates) {
      const std::int64_t value = eval_expr(*upd.value, model, v);
      const auto& decl = model.variables[upd.slot];
      if (value < decl.lo || value > decl.hi) {
        std::string label = cmd.label ? " [" + *cmd.label + "]" : "";
        throw Error(ErrorKind::Model, "command " + std::to_string(i + 1) + label + " drives '" + decl.name +
                                          "' to " + std::to_string(value) + ", outside " +
                                          std::to_string(decl.lo) + ".." + std::to_string(decl.hi));
      }
      next[upd.slot] = value;
    }
    out.push_back(std::move(next));
  }
  if (out.empty()) {
    out.push_back(v);
    return out;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace tracecheck
