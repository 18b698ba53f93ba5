#include <random>

#include "doctest.h"
#include "tracecheck/error.hpp"
#include "tracecheck/graph.hpp"
#include "tracecheck/lang.hpp"

using namespace tracecheck;

namespace {

const char* kChain2 = "var x : 0..1 init 0;\n[] x==0 -> x'=1;\n";
const char* kToggle = "var x : 0..1 init 0;\n[] x==0 -> x'=1;\n[] x==1 -> x'=0;\n";

std::int64_t eval_text(const char* model_text, const char* expr_text, Valuation v) {
  // Evaluate an expression by parsing it as the guard of a throwaway command.
  std::string text = std::string(model_text) + "[] " + expr_text + " -> skip;\n";
  SystemModel m = parse_model(text);
  return eval_expr(*m.commands.back().guard, m, v);
}

std::int64_t eval_int(const char* model_text, const char* expr_text, Valuation v) {
  std::string text = std::string(model_text) + "[] true -> x'=" + expr_text + ";\n";
  SystemModel m = parse_model(text);
  return eval_expr(*m.commands.back().updates[0].value, m, v);
}

}  // namespace

TEST_SUITE("gcm-core") {
  TEST_CASE("eval_expr on comparisons, arithmetic and connectives") {
    const char* decls = "var x : 0..9 init 0;\nvar y : 0..9 init 0;\n";
    CHECK(eval_text(decls, "x==0", {0, 0}) == 1);
    CHECK(eval_int(decls, "x+1", {1, 0}) == 2);
    CHECK(eval_text(decls, "x==0 & y!=2", {0, 2}) == 0);
    CHECK(eval_int(decls, "x*y-3", {2, 4}) == 5);
    CHECK(eval_int(decls, "-x+y", {2, 4}) == 2);
    CHECK(eval_text(decls, "!(x<y) | x>=9", {1, 2}) == 0);
  }

  TEST_CASE("constants resolve in expressions") {
    SystemModel m = parse_model("const K = 3;\nvar s : 0..3 init 0;\n[] s<K -> s'=s+1;\n");
    CHECK(eval_expr(*m.commands[0].guard, m, {2}) == 1);
    CHECK(eval_expr(*m.commands[0].guard, m, {3}) == 0);
  }

  TEST_CASE("arithmetic overflow is a model error") {
    const char* decls = "var x : 0..9 init 0;\n";
    CHECK_THROWS_WITH_AS(eval_int(decls, "9223372036854775807+x", {1}), doctest::Contains("overflow"), Error);
    CHECK(eval_int(decls, "9223372036854775807+x", {0}) == INT64_MAX);
  }

  TEST_CASE("step applies one enabled command and self-loops on deadlock") {
    SystemModel chain2 = parse_model(kChain2);
    CHECK(step(chain2, {0}) == std::vector<Valuation>{{1}});
    CHECK(step(chain2, {1}) == std::vector<Valuation>{{1}});
    SystemModel toggle = parse_model(kToggle);
    CHECK(step(toggle, {0}) == std::vector<Valuation>{{1}});
    CHECK(step(toggle, {1}) == std::vector<Valuation>{{0}});
  }

  TEST_CASE("step updates are simultaneous") {
    SystemModel m = parse_model("var x : 0..5 init 1;\nvar y : 0..5 init 2;\n[] true -> x'=y & y'=x;\n");
    CHECK(step(m, {1, 2}) == std::vector<Valuation>{{2, 1}});
  }

  TEST_CASE("step collects nondeterministic successors sorted and deduplicated") {
    SystemModel m = parse_model(
        "var x : 0..5 init 0;\n[] x==0 -> x'=3;\n[] x==0 -> x'=1;\n[] x<2 -> x'=3;\n[] x==1 -> skip;\n");
    CHECK(step(m, {0}) == std::vector<Valuation>{{1}, {3}});
    CHECK(step(m, {1}) == std::vector<Valuation>{{1}, {3}});
  }

  TEST_CASE("out-of-range update names the command and variable") {
    SystemModel m = parse_model("var x : 0..1 init 1;\n[go] true -> x'=x+1;\n");
    CHECK_THROWS_WITH_AS(step(m, {1}), doctest::Contains("command 1 [go] drives 'x' to 2"), Error);
  }

  TEST_CASE("build_graph on the basic examples") {
    StateGraph g = build_graph(parse_model(kChain2));
    REQUIRE(g.state_count() == 2);
    CHECK(g.states()[0] == Valuation{0});
    CHECK(g.states()[1] == Valuation{1});
    CHECK(g.initial() == std::vector<StateIndex>{0});
    CHECK(g.successors(0) == std::vector<StateIndex>{1});
    CHECK(g.successors(1) == std::vector<StateIndex>{1});
    CHECK(g.edge_count() == 2);

    StateGraph t = build_graph(parse_model(kToggle));
    REQUIRE(t.state_count() == 2);
    CHECK(t.successors(0) == std::vector<StateIndex>{1});
    CHECK(t.successors(1) == std::vector<StateIndex>{0});

    StateGraph idle = build_graph(parse_model("var x : 0..3 init 2;\n"));
    REQUIRE(idle.state_count() == 1);
    CHECK(idle.successors(0) == std::vector<StateIndex>{0});
  }

  TEST_CASE("init constraint widens the initial set") {
    SystemModel m = parse_model("var x : 0..3 init 0;\ninit x>=2;\n[] x<3 -> x'=x+1;\n");
    StateGraph g = build_graph(m);
    std::vector<Valuation> init;
    for (StateIndex i : g.initial()) init.push_back(g.states()[i]);
    std::sort(init.begin(), init.end());
    CHECK(init == std::vector<Valuation>{{0}, {2}, {3}});
    CHECK(g.state_count() == 4);
  }

  TEST_CASE("state budget overflow is a state explosion error") {
    SystemModel m = parse_model("var x : 0..100 init 0;\n[] x<100 -> x'=x+1;\n");
    CHECK(build_graph(m, 101).state_count() == 101);
    try {
      build_graph(m, 100);
      FAIL("expected state explosion");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StateExplosion);
      CHECK(std::string(e.what()).find("state explosion") != std::string::npos);
    }
  }

  TEST_CASE("graph invariants on random models: determinism, totality, closure, domain safety, agreement") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 200; ++round) {
      // Random guarded-command model over two small variables.
      auto r = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
      std::string text = "var a : 0..3 init " + std::to_string(r(0, 3)) + ";\nvar b : 0..2 init " +
                         std::to_string(r(0, 2)) + ";\n";
      int ncmd = r(0, 5);
      for (int c = 0; c < ncmd; ++c) {
        text += "[] a" + std::string(r(0, 1) ? "<" : "!=") + std::to_string(r(0, 3)) + " | b==" +
                std::to_string(r(0, 2)) + " -> a'=" + std::to_string(r(0, 3)) + " & b'=" + std::to_string(r(0, 2)) +
                ";\n";
      }
      SystemModel m = parse_model(text);
      StateGraph g = build_graph(m);
      CHECK(g == build_graph(parse_model(text)));
      for (StateIndex s = 0; s < g.state_count(); ++s) {
        const Valuation& v = g.states()[s];
        CHECK(v[0] >= 0);
        CHECK(v[0] <= 3);
        CHECK(v[1] >= 0);
        CHECK(v[1] <= 2);
        REQUIRE(!g.successors(s).empty());
        std::vector<Valuation> listed;
        for (StateIndex t : g.successors(s)) {
          REQUIRE(t < g.state_count());
          listed.push_back(g.states()[t]);
        }
        std::sort(listed.begin(), listed.end());
        CHECK(listed == step(m, v));
      }
    }
  }
}

TEST_SUITE("gcm-lang") {
  TEST_CASE("parse chain2 and print canonically") {
    SystemModel m = parse_model(kChain2);
    REQUIRE(m.variables.size() == 1);
    CHECK(m.variables[0] == VarDecl{"x", 0, 1, 0});
    REQUIRE(m.commands.size() == 1);
    CHECK(!m.commands[0].label);
    CHECK(print_model(m) == "var x : 0..1 init 0;\n[] x==0 -> x'=1;\n");
  }

  TEST_CASE("counter model with a constant has 4 reachable states") {
    SystemModel m = parse_model("const K = 3; var s : 0..3 init 0; [] s<K -> s'=s+1;");
    CHECK(build_graph(m).state_count() == 4);
    CHECK(model_equal(parse_model(print_model(m)), m));
  }

  TEST_CASE("comments, labels, skip and negative bounds") {
    SystemModel m = parse_model(
        "// header\nconst N = -2; // neg\nvar x : -3..3 init -1;\n[robot] x>N -> x'=x-1; // move\n[] x==N -> skip;\n");
    CHECK(m.variables[0] == VarDecl{"x", -3, 3, -1});
    CHECK(*m.commands[0].label == "robot");
    CHECK(m.commands[1].updates.empty());
    CHECK(model_equal(parse_model(print_model(m)), m));
  }

  TEST_CASE("model parse errors carry positions") {
    CHECK_THROWS_WITH_AS(parse_model("var x : 0..1 init 2;"), doctest::Contains("init out of bounds"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model("var x : 0..1 init 0;\nvar x : 0..1 init 0;"), doctest::Contains("duplicate"),
                         ParseError);
    CHECK_THROWS_WITH_AS(parse_model("var x : 0..1 init 0;\n[] y==0 -> x'=1;"), doctest::Contains("unknown"),
                         ParseError);
    CHECK_THROWS_AS(parse_model(""), ParseError);
    CHECK_THROWS_AS(parse_model("var x : 0..1 init 0;\n[] x==0 -> x'=1 & x'=0;"), ParseError);
    CHECK_THROWS_AS(parse_model("var x : 0..1 init 0;\n[] x+1 -> x'=1;"), ParseError);
    CHECK_THROWS_AS(parse_model("var x : 0..1 init 0;\n[] x==0 -> x'=x==1;"), ParseError);
    CHECK_THROWS_AS(parse_model("var x : 2..1 init 1;"), ParseError);
    CHECK_THROWS_AS(parse_model("const x = 1; var x : 0..1 init 0;"), ParseError);
    try {
      parse_model("var x : 0..1 init 0;\n[] x==0 -> x'=1\n");
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() == 1);
    }
  }

  TEST_CASE("formula parsing and precedence") {
    auto x0 = ctl_atom("x", Comparator::Eq, 0);
    auto x1 = ctl_atom("x", Comparator::Eq, 1);
    CHECK(formula_equal(*parse_formula("x==0 & EX(x==1)"), *ctl_and(x0, ctl_unary(Formula::Op::EX, x1))));
    CHECK(formula_equal(*parse_formula("AG(x==1)"), *ctl_unary(Formula::Op::AG, x1)));
    CHECK(formula_equal(*parse_formula("EX x==1 & x==0"), *ctl_and(ctl_unary(Formula::Op::EX, x1), x0)));
    CHECK(formula_equal(*parse_formula("a==1 | b==2 & c==3"),
                        *ctl_or(ctl_atom("a", Comparator::Eq, 1),
                                ctl_and(ctl_atom("b", Comparator::Eq, 2), ctl_atom("c", Comparator::Eq, 3)))));
    CHECK(formula_equal(*parse_formula("true & !false"), *ctl_and(ctl_true(), ctl_not(ctl_false()))));
    CHECK(formula_equal(*parse_formula("x>=-2"), *ctl_atom("x", Comparator::Ge, -2)));
  }

  TEST_CASE("formula printing keeps precedence") {
    auto f = ctl_and(ctl_or(ctl_atom("a", Comparator::Eq, 1), ctl_atom("b", Comparator::Eq, 1)),
                     ctl_atom("c", Comparator::Eq, 1));
    CHECK(print_formula(*f) == "(a==1 | b==1) & c==1");
    CHECK(print_formula(*parse_formula("x==0 & EX(x==1 & AG(x==1))")) == "x==0 & EX(x==1 & AG(x==1))");
  }

  TEST_CASE("formula parse errors") {
    CHECK_THROWS_WITH_AS(parse_formula("x =< 1"), doctest::Contains("unknown comparator"), ParseError);
    CHECK_THROWS_AS(parse_formula("x==1 &"), ParseError);
    CHECK_THROWS_AS(parse_formula("EX"), ParseError);
    CHECK_THROWS_AS(parse_formula("(x==1"), ParseError);
    CHECK_THROWS_AS(parse_formula("x==1 x==2"), ParseError);
    CHECK_THROWS_AS(parse_formula("x==y"), ParseError);
  }
}
