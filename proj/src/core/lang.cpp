#include "tracecheck/lang.hpp"

#include <set>
#include <sstream>

#include "lexer.hpp"

namespace tracecheck {

using detail::Tok;
using detail::Token;
using detail::TokenStream;

namespace {

const std::set<std::string, std::less<>> kModelKeywords = {"const", "var", "init", "skip", "true", "false"};

struct Typed {
  ExprPtr expr;
  ExprType type;
  Token at;
};

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : ts_(detail::tokenize(text)) {}

  SystemModel run() {
    while (ts_.at_keyword("const")) parse_const();
    if (!ts_.at_keyword("var")) TokenStream::fail(ts_.peek(), "expected 'var' declaration, found " + TokenStream::describe(ts_.peek()));
    while (ts_.at_keyword("var")) parse_var();
    if (ts_.at_keyword("init")) {
      ts_.next();
      model_.init_constraint = expect_type(parse_or(), ExprType::Bool, "init constraint").expr;
      ts_.expect(Tok::Semi, "';'");
    }
    while (!ts_.at(Tok::End)) parse_command();
    check_model(model_);
    return std::move(model_);
  }

 private:
  const Token& declare(std::string_view what) {
    const Token& name = ts_.expect(Tok::Ident, std::string(what) + " name");
    if (kModelKeywords.count(name.text)) TokenStream::fail(name, "reserved word '" + name.text + "' used as a name");
    if (!names_.insert(name.text).second) TokenStream::fail(name, "duplicate declaration of '" + name.text + "'");
    return name;
  }

  std::int64_t signed_int() {
    const bool negative = ts_.accept(Tok::Minus);
    const Token& t = ts_.expect(Tok::Int, "integer");
    return negative ? -t.value : t.value;
  }

  void parse_const() {
    ts_.expect_keyword("const");
    const Token name = declare("constant");
    ts_.expect(Tok::Assign, "'='");
    const std::int64_t value = signed_int();
    ts_.expect(Tok::Semi, "';'");
    model_.constants.emplace_back(name.text, value);
  }

  void parse_var() {
    ts_.expect_keyword("var");
    const Token name = declare("variable");
    ts_.expect(Tok::Colon, "':'");
    VarDecl decl;
    decl.name = name.text;
    decl.lo = signed_int();
    ts_.expect(Tok::DotDot, "'..'");
    decl.hi = signed_int();
    if (decl.lo > decl.hi) TokenStream::fail(name, "empty domain for variable '" + name.text + "'");
    ts_.expect_keyword("init");
    const Token& init_at = ts_.peek();
    decl.init = signed_int();
    if (decl.init < decl.lo || decl.init > decl.hi) TokenStream::fail(init_at, "init out of bounds");
    ts_.expect(Tok::Semi, "';'");
    model_.variables.push_back(std::move(decl));
  }

  void parse_command() {
    GuardedCommand cmd;
    ts_.expect(Tok::LBracket, "'[' starting a command");
    if (ts_.at(Tok::Ident)) cmd.label = ts_.next().text;
    ts_.expect(Tok::RBracket, "']'");
    cmd.guard = expect_type(parse_or(), ExprType::Bool, "guard").expr;
    ts_.expect(Tok::Arrow, "'->'");
    if (ts_.at_keyword("skip")) {
      ts_.next();
    } else {
      std::set<std::string> assigned;
      do {
        const Token& target = ts_.expect(Tok::Ident, "variable name");
        auto slot = model_.variable_index(target.text);
        if (!slot) TokenStream::fail(target, "unknown variable '" + target.text + "' in update");
        if (!assigned.insert(target.text).second) {
          TokenStream::fail(target, "variable '" + target.text + "' updated twice in one command");
        }
        ts_.expect(Tok::Prime, "''' after updated variable");
        ts_.expect(Tok::Assign, "'='");
        auto value = expect_type(parse_sum(), ExprType::Int, "update");
        cmd.updates.push_back(Assignment{target.text, *slot, value.expr});
      } while (ts_.accept(Tok::Amp));
    }
    ts_.expect(Tok::Semi, "';'");
    model_.commands.push_back(std::move(cmd));
  }

  static Typed expect_type(Typed t, ExprType want, std::string_view what) {
    if (t.type != want) {
      TokenStream::fail(t.at, std::string(what) + " must be " + (want == ExprType::Bool ? "boolean" : "an integer expression"));
    }
    return t;
  }

  Typed parse_or() {
    Typed lhs = parse_and();
    while (ts_.at(Tok::Bar)) {
      ts_.next();
      Typed rhs = expect_type(parse_and(), ExprType::Bool, "operand of '|'");
      expect_type(lhs, ExprType::Bool, "operand of '|'");
      lhs = Typed{make_binary(Expr::Op::Or, lhs.expr, rhs.expr), ExprType::Bool, lhs.at};
    }
    return lhs;
  }

  Typed parse_and() {
    Typed lhs = parse_not();
    while (ts_.at(Tok::Amp)) {
      ts_.next();
      Typed rhs = expect_type(parse_not(), ExprType::Bool, "operand of '&'");
      expect_type(lhs, ExprType::Bool, "operand of '&'");
      lhs = Typed{make_binary(Expr::Op::And, lhs.expr, rhs.expr), ExprType::Bool, lhs.at};
    }
    return lhs;
  }

  Typed parse_not() {
    if (ts_.at(Tok::Bang)) {
      const Token at = ts_.next();
      Typed operand = expect_type(parse_not(), ExprType::Bool, "operand of '!'");
      return Typed{make_unary(Expr::Op::Not, operand.expr), ExprType::Bool, at};
    }
    return parse_rel();
  }

  Typed parse_rel() {
    Typed lhs = parse_sum();
    Expr::Op op;
    switch (ts_.peek().kind) {
      case Tok::Eq: op = Expr::Op::Eq; break;
      case Tok::Ne: op = Expr::Op::Ne; break;
      case Tok::Lt: op = Expr::Op::Lt; break;
      case Tok::Le: op = Expr::Op::Le; break;
      case Tok::Gt: op = Expr::Op::Gt; break;
      case Tok::Ge: op = Expr::Op::Ge; break;
      default: return lhs;
    }
    ts_.next();
    expect_type(lhs, ExprType::Int, "comparison operand");
    Typed rhs = expect_type(parse_sum(), ExprType::Int, "comparison operand");
    return Typed{make_binary(op, lhs.expr, rhs.expr), ExprType::Bool, lhs.at};
  }

  Typed parse_sum() {
    Typed lhs = parse_prod();
    while (ts_.at(Tok::Plus) || ts_.at(Tok::Minus)) {
      const auto op = ts_.next().kind == Tok::Plus ? Expr::Op::Add : Expr::Op::Sub;
      expect_type(lhs, ExprType::Int, "arithmetic operand");
      Typed rhs = expect_type(parse_prod(), ExprType::Int, "arithmetic operand");
      lhs = Typed{make_binary(op, lhs.expr, rhs.expr), ExprType::Int, lhs.at};
    }
    return lhs;
  }

  Typed parse_prod() {
    Typed lhs = parse_unary();
    while (ts_.at(Tok::Star)) {
      ts_.next();
      expect_type(lhs, ExprType::Int, "arithmetic operand");
      Typed rhs = expect_type(parse_unary(), ExprType::Int, "arithmetic operand");
      lhs = Typed{make_binary(Expr::Op::Mul, lhs.expr, rhs.expr), ExprType::Int, lhs.at};
    }
    return lhs;
  }

  Typed parse_unary() {
    if (ts_.at(Tok::Minus)) {
      const Token at = ts_.next();
      // A minus directly before a literal folds into a negative literal.
      if (ts_.at(Tok::Int)) return Typed{make_int(-ts_.next().value), ExprType::Int, at};
      Typed operand = expect_type(parse_unary(), ExprType::Int, "operand of unary '-'");
      return Typed{make_unary(Expr::Op::Neg, operand.expr), ExprType::Int, at};
    }
    return parse_primary();
  }

  Typed parse_primary() {
    const Token t = ts_.peek();
    switch (t.kind) {
      case Tok::Int:
        ts_.next();
        return Typed{make_int(t.value), ExprType::Int, t};
      case Tok::LParen: {
        ts_.next();
        Typed inner = parse_or();
        ts_.expect(Tok::RParen, "')'");
        inner.at = t;
        return inner;
      }
      case Tok::Ident:
        ts_.next();
        if (t.text == "true" || t.text == "false") return Typed{make_bool(t.text == "true"), ExprType::Bool, t};
        if (auto slot = model_.variable_index(t.text)) return Typed{make_ident(t.text, *slot), ExprType::Int, t};
        if (model_.constant(t.text)) return Typed{make_ident(t.text), ExprType::Int, t};
        TokenStream::fail(t, "unknown identifier '" + t.text + "'");
      default:
        TokenStream::fail(t, "expected expression, found " + TokenStream::describe(t));
    }
  }

  TokenStream ts_;
  SystemModel model_;
  std::set<std::string> names_;
};

int expr_precedence(const Expr& e) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Not: return 3;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Mul: return 6;
    case Op::Neg: return 7;
    case Op::IntLit:
    case Op::BoolLit:
    case Op::Ident: return 8;
    default: return 4;  // comparisons
  }
}

const char* expr_operator(Expr::Op op) {
  using Op = Expr::Op;
  switch (op) {
    case Op::Or: return " | ";
    case Op::And: return " & ";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    default: return "?";
  }
}

void print_expr_into(std::ostringstream& out, const Expr& e, int min_prec) {
  const int prec = expr_precedence(e);
  const bool parens = prec < min_prec;
  if (parens) out << '(';
  switch (e.op) {
    case Expr::Op::IntLit: out << e.value; break;
    case Expr::Op::BoolLit: out << (e.value ? "true" : "false"); break;
    case Expr::Op::Ident: out << e.name; break;
    case Expr::Op::Not:
      out << '!';
      print_expr_into(out, *e.lhs, 3);
      break;
    case Expr::Op::Neg:
      out << '-';
      // A bare literal after '-' would be folded back into a negative literal.
      print_expr_into(out, *e.lhs, e.lhs->op == Expr::Op::IntLit ? 9 : 7);
      break;
    default:
      if (is_comparison(e.op)) {
        print_expr_into(out, *e.lhs, 5);
        out << expr_operator(e.op);
        print_expr_into(out, *e.rhs, 5);
      } else {
        print_expr_into(out, *e.lhs, prec);
        out << expr_operator(e.op);
        print_expr_into(out, *e.rhs, prec + 1);
      }
      break;
  }
  if (parens) out << ')';
}

// Formula parser.
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : ts_(detail::tokenize(text)) {}

  FormulaPtr run() {
    FormulaPtr f = parse_or();
    if (!ts_.at(Tok::End)) TokenStream::fail(ts_.peek(), "unexpected " + TokenStream::describe(ts_.peek()));
    return f;
  }

 private:
  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (ts_.accept(Tok::Bar)) lhs = ctl_or(lhs, parse_and());
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (ts_.accept(Tok::Amp)) lhs = ctl_and(lhs, parse_unary());
    return lhs;
  }

  static std::optional<Formula::Op> temporal(const Token& t) {
    if (t.kind != Tok::Ident) return std::nullopt;
    static const std::pair<const char*, Formula::Op> table[] = {
        {"EX", Formula::Op::EX}, {"EF", Formula::Op::EF}, {"EG", Formula::Op::EG},
        {"AX", Formula::Op::AX}, {"AF", Formula::Op::AF}, {"AG", Formula::Op::AG},
    };
    for (const auto& [kw, op] : table) {
      if (t.text == kw) return op;
    }
    return std::nullopt;
  }

  FormulaPtr parse_unary() {
    if (ts_.accept(Tok::Bang)) return ctl_not(parse_unary());
    if (auto op = temporal(ts_.peek())) {
      ts_.next();
      return ctl_unary(*op, parse_unary());
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    const Token t = ts_.peek();
    if (ts_.accept(Tok::LParen)) {
      FormulaPtr inner = parse_or();
      ts_.expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind != Tok::Ident) TokenStream::fail(t, "expected formula, found " + TokenStream::describe(t));
    ts_.next();
    if (t.text == "true") return ctl_true();
    if (t.text == "false") return ctl_false();
    Comparator cmp;
    switch (ts_.peek().kind) {
      case Tok::Eq: cmp = Comparator::Eq; break;
      case Tok::Ne: cmp = Comparator::Ne; break;
      case Tok::Lt: cmp = Comparator::Lt; break;
      case Tok::Le: cmp = Comparator::Le; break;
      case Tok::Gt: cmp = Comparator::Gt; break;
      case Tok::Ge: cmp = Comparator::Ge; break;
      default:
        TokenStream::fail(ts_.peek(), "unknown comparator " + TokenStream::describe(ts_.peek()) + " after '" + t.text + "'");
    }
    ts_.next();
    const bool negative = ts_.accept(Tok::Minus);
    const Token& value = ts_.expect(Tok::Int, "integer after comparator");
    return ctl_atom(t.text, cmp, negative ? -value.value : value.value);
  }

  TokenStream ts_;
};

int formula_precedence(const Formula& f) {
  switch (f.op) {
    case Formula::Op::Or: return 1;
    case Formula::Op::And: return 2;
    default: return 3;
  }
}

void print_formula_into(std::ostringstream& out, const Formula& f, int min_prec) {
  const bool parens = formula_precedence(f) < min_prec;
  if (parens) out << '(';
  switch (f.op) {
    case Formula::Op::True: out << "true"; break;
    case Formula::Op::False: out << "false"; break;
    case Formula::Op::Atom: out << f.var << comparator_text(f.cmp) << f.value; break;
    case Formula::Op::Not:
      out << "!(";
      print_formula_into(out, *f.lhs, 0);
      out << ')';
      break;
    case Formula::Op::And:
      print_formula_into(out, *f.lhs, 2);
      out << " & ";
      print_formula_into(out, *f.rhs, 3);
      break;
    case Formula::Op::Or:
      print_formula_into(out, *f.lhs, 1);
      out << " | ";
      print_formula_into(out, *f.rhs, 2);
      break;
    default:
      out << temporal_keyword(f.op) << '(';
      print_formula_into(out, *f.lhs, 0);
      out << ')';
      break;
  }
  if (parens) out << ')';
}

}  // namespace

SystemModel parse_model(std::string_view text) { return ModelParser(text).run(); }

std::string print_expr(const Expr& expr) {
  std::ostringstream out;
  print_expr_into(out, expr, 0);
  return out.str();
}

std::string print_model(const SystemModel& model) {
  std::ostringstream out;
  for (const auto& [name, value] : model.constants) out << "const " << name << " = " << value << ";\n";
  for (const auto& v : model.variables) {
    out << "var " << v.name << " : " << v.lo << ".." << v.hi << " init " << v.init << ";\n";
  }
  if (model.init_constraint) out << "init " << print_expr(*model.init_constraint) << ";\n";
  for (const auto& cmd : model.commands) {
    out << '[' << cmd.label.value_or("") << "] " << print_expr(*cmd.guard) << " -> ";
    if (cmd.updates.empty()) {
      out << "skip";
    } else {
      for (std::size_t i = 0; i < cmd.updates.size(); ++i) {
        if (i) out << " & ";
        out << cmd.updates[i].var << "'=" << print_expr(*cmd.updates[i].value);
      }
    }
    out << ";\n";
  }
  return out.str();
}

FormulaPtr parse_formula(std::string_view text) { return FormulaParser(text).run(); }

std::string print_formula(const Formula& f) {
  std::ostringstream out;
  print_formula_into(out, f, 0);
  return out.str();
}

}  // namespace tracecheck
