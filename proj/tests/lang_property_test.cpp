// Property tests for the text formats: print/parse round trips on random ASTs
// and a fuzz pass showing the parsers only ever return an AST or a positioned
// ParseError.
#include <random>

#include "doctest.h"
#include "support/oracle.hpp"
#include "tracecheck/error.hpp"
#include "tracecheck/graph.hpp"
#include "tracecheck/lang.hpp"

using namespace tracecheck;

namespace {

struct ExprGen {
  std::mt19937_64& rng;
  const SystemModel& model;

  int r(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  ExprPtr integer(int depth) {
    if (depth <= 1 || r(3) == 0) {
      switch (r(3)) {
        case 0:
          return make_int(r(21) - 10);
        case 1: {
          std::size_t i = static_cast<std::size_t>(r(static_cast<int>(model.variables.size())));
          return make_ident(model.variables[i].name, i);
        }
        default:
          if (model.constants.empty()) return make_int(r(5));
          return make_ident(model.constants[static_cast<std::size_t>(r(static_cast<int>(model.constants.size())))].first);
      }
    }
    static constexpr Expr::Op kOps[] = {Expr::Op::Add, Expr::Op::Sub, Expr::Op::Mul};
    if (r(5) == 0) return make_unary(Expr::Op::Neg, integer(depth - 1));
    return make_binary(kOps[r(3)], integer(depth - 1), integer(depth - 1));
  }

  ExprPtr boolean(int depth) {
    if (depth <= 1 || r(4) == 0) {
      if (r(6) == 0) return make_bool(r(2) == 1);
      static constexpr Expr::Op kCmp[] = {Expr::Op::Eq, Expr::Op::Ne, Expr::Op::Lt,
                                          Expr::Op::Le, Expr::Op::Gt, Expr::Op::Ge};
      return make_binary(kCmp[r(6)], integer(depth - 1), integer(depth - 1));
    }
    switch (r(3)) {
      case 0:
        return make_unary(Expr::Op::Not, boolean(depth - 1));
      case 1:
        return make_binary(Expr::Op::And, boolean(depth - 1), boolean(depth - 1));
      default:
        return make_binary(Expr::Op::Or, boolean(depth - 1), boolean(depth - 1));
    }
  }
};

SystemModel random_model(std::mt19937_64& rng) {
  auto r = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  SystemModel m;
  int nconst = r(3);
  for (int i = 0; i < nconst; ++i) m.constants.push_back({"C" + std::to_string(i), r(11) - 5});
  int nvar = 1 + r(3);
  for (int i = 0; i < nvar; ++i) {
    std::int64_t lo = r(5) - 2;
    std::int64_t hi = lo + r(4);
    m.variables.push_back({"v" + std::to_string(i), lo, hi, lo + r(static_cast<int>(hi - lo + 1))});
  }
  ExprGen gen{rng, m};
  if (r(3) == 0) m.init_constraint = gen.boolean(3);
  int ncmd = r(4);
  for (int c = 0; c < ncmd; ++c) {
    GuardedCommand cmd;
    if (r(2)) cmd.label = "act" + std::to_string(c);
    cmd.guard = gen.boolean(4);
    for (std::size_t i = 0; i < m.variables.size(); ++i) {
      if (r(2)) cmd.updates.push_back({m.variables[i].name, i, gen.integer(3)});
    }
    m.commands.push_back(std::move(cmd));
  }
  return m;
}

}  // namespace

TEST_SUITE("gcm-lang properties") {
  TEST_CASE("random models round-trip through print and parse") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
      SystemModel m = random_model(rng);
      std::string text = print_model(m);
      INFO(text);
      SystemModel back = parse_model(text);
      REQUIRE(model_equal(back, m));
      CHECK(print_model(back) == text);
    }
  }

  TEST_CASE("random formulas round-trip through print and parse") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 5000; ++i) {
      FormulaPtr f = tctest::random_formula(rng, 1 + static_cast<int>(rng() % 6), {"x", "y", "k"});
      std::string text = print_formula(*f);
      INFO(text);
      FormulaPtr back = parse_formula(text);
      REQUIRE(formula_equal(*back, *f));
      CHECK(print_formula(*back) == text);
    }
  }

  TEST_CASE("parsed atom comparators agree with expression evaluation") {
    const char* ops[] = {"==", "!=", "<", "<=", ">", ">="};
    for (const char* op : ops) {
      SystemModel m = parse_model(std::string("var x : -3..3 init 0;\n[] x") + op + "1 -> skip;\n");
      FormulaPtr f = parse_formula(std::string("x") + op + "1");
      for (std::int64_t x = -3; x <= 3; ++x) {
        CHECK(compare(x, f->cmp, f->value) == (eval_expr(*m.commands[0].guard, m, {x}) != 0));
      }
    }
  }

  TEST_CASE("fuzz: parsers return an AST or a positioned error, never anything else") {
    std::mt19937_64 rng(13);
    const std::vector<std::string> pieces = {
        "var", "const", "init", "skip", "true", "false", "x", "y", "K", "0", "1", "-", "42", "..", ":", ";",
        "[",   "]",     "(",    ")",    "->",   "'",     "=", "==", "!=", "<", "<=", ">", ">=", "&", "|",
        "!",   "+",     "*",    "EX",   "AG",   "EF",    "@", "#",  "\n", " ", "//c\n", "9999999999999999999999"};
    std::size_t asts = 0;
    for (int i = 0; i < 20000; ++i) {
      std::string text;
      int len = 1 + static_cast<int>(rng() % 14);
      // Half the inputs start from a valid prefix to push the parser deeper.
      if (rng() % 2) text = "var x : 0..3 init 0;\n";
      for (int j = 0; j < len; ++j) {
        text += pieces[rng() % pieces.size()];
        if (rng() % 2) text += ' ';
      }
      if (rng() % 10 == 0) text[rng() % text.size()] = static_cast<char>(rng() % 256);
      for (int which = 0; which < 2; ++which) {
        try {
          if (which == 0) {
            parse_model(text);
          } else {
            parse_formula(text);
          }
          ++asts;
        } catch (const ParseError& e) {
          CHECK(e.line() >= 1);
          CHECK(e.column() >= 1);
          CHECK(e.offset() <= text.size());
        } catch (const Error& e) {
          FAIL("non-parse error escaped: " << e.what() << " for input: " << text);
        }
      }
    }
    CHECK(asts > 0);
  }
}
