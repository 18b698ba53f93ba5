#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "support/towns.hpp"
#include "tracecheck/error.hpp"
#include "tracecheck/graph.hpp"
#include "tracecheck/lang.hpp"
#include "tracecheck/lifecycle.hpp"
#include "tracecheck/townsim.hpp"

using namespace tracecheck;
using namespace tracecheck::town;

namespace {

// A (0,0) tagged 1, B (1,0) untagged, start at A heading east toward B.
const char* kTwoNode = R"({"width":2,"height":1,
  "nodes":[{"x":0,"y":0,"tag":1},{"x":1,"y":0,"tag":0}],
  "edges":[{"from":[0,0],"to":[1,0]},{"from":[1,0],"to":[0,0]}],
  "start":{"x":0,"y":0,"d":1}})";
const char* kForward = R"({"sequence":[{"tag":1,"action":"forward"}]})";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Rows = std::vector<std::vector<std::int64_t>>;

Verdict verdict(const std::string& model, const ExecutionLog& log, PropertyType type) {
  ValidationOptions o;
  o.type = type;
  return evaluate_result(model, print_log(log), o).verdict;
}

}  // namespace

TEST_SUITE("townsim") {
  TEST_CASE("headings and turns") {
    CHECK(turn(0, Action::Left) == 3);
    CHECK(turn(3, Action::Right) == 0);
    CHECK(turn(2, Action::Forward) == 2);
    CHECK(kDx[1] == 1);
    CHECK(kDy[0] == 1);
    CHECK(kDy[2] == -1);
    CHECK(kDx[3] == -1);
  }

  TEST_CASE("load_objective and load_town") {
    Objective o = load_objective(R"({"sequence":[{"tag":1,"action":"left"}]})");
    REQUIRE(o.sequence.size() == 1);
    CHECK(o.sequence[0].tag == 1);
    CHECK(o.sequence[0].action == Action::Left);
    CHECK_THROWS_WITH_AS(load_objective(R"({"sequence":[]})"), doctest::Contains("non-empty sequence required"),
                         Error);
    CHECK_THROWS_AS(load_objective(R"({"sequence":[{"tag":1,"action":"jump"}]})"), Error);
    CHECK_THROWS_AS(load_objective("[1]"), Error);

    TownMap m = load_town(kTwoNode);
    CHECK(m.nodes.size() == 2);
    CHECK(m.has_edge(0, 0, 1));
    CHECK(!m.has_edge(0, 0, 0));
    CHECK(load_town(town_to_json(m)).edges == m.edges);
    CHECK(load_objective(objective_to_json(o)).sequence.size() == 1);

    CHECK_THROWS_AS(load_town(R"({"width":2,"height":1,"nodes":[{"x":0,"y":0,"tag":1},{"x":1,"y":0,"tag":1}],"edges":[]})"),
                    Error);
    CHECK_THROWS_AS(load_town(R"({"width":3,"height":1,"nodes":[{"x":0,"y":0,"tag":1},{"x":2,"y":0,"tag":0}],"edges":[{"from":[0,0],"to":[2,0]}]})"),
                    Error);
    CHECK_THROWS_AS(load_town(R"({"width":2,"height":1,"nodes":[{"x":0,"y":0,"tag":1}],"edges":[{"from":[0,0],"to":[1,0]}]})"),
                    Error);
    CHECK_THROWS_AS(load_town(R"({"width":1,"height":1,"nodes":[{"x":3,"y":0,"tag":1}],"edges":[]})"), Error);
    CHECK_THROWS_AS(load_town(R"({"width":1,"height":1,"nodes":[{"x":0,"y":0,"tag":1},{"x":0,"y":0,"tag":2}],"edges":[]})"),
                    Error);
  }

  TEST_CASE("two-node town: unique run A to B, then B fixed") {
    TownMap m = load_town(kTwoNode);
    Objective o = load_objective(kForward);
    SystemModel model = parse_model(build_model_text(m, o));
    StateGraph g = build_graph(model);
    REQUIRE(g.state_count() == 2);
    CHECK(g.states()[0] == Valuation{0, 0, 1, 0});
    CHECK(g.states()[1] == Valuation{1, 0, 1, 1});
    CHECK(g.successors(0) == std::vector<StateIndex>{1});
    CHECK(g.successors(1) == std::vector<StateIndex>{1});

    Simulation sim = simulate(m, o);
    CHECK(sim.completed);
    CHECK(sim.log.variables == std::vector<std::string>{"x", "y", "d", "k"});
    CHECK(sim.log.rows == Rows{{0, 0, 1, 0}, {1, 0, 1, 1}, {1, 0, 1, 1}});

    CHECK(simulate(m, o, parse_fault("forge:2,k,0")).log.rows == Rows{{0, 0, 1, 0}, {1, 0, 1, 0}, {1, 0, 1, 1}});
    CHECK_THROWS_WITH_AS(simulate(m, o, parse_fault("skip:2")), doctest::Contains("no interior row to skip"), Error);
    CHECK(simulate(m, o, parse_fault("truncate:1")).log.rows == Rows{{0, 0, 1, 0}, {1, 0, 1, 1}});
    CHECK_THROWS_AS(simulate(m, o, parse_fault("truncate:2")), Error);
    CHECK_THROWS_AS(simulate(m, o, parse_fault("forge:4,k,0")), Error);
    CHECK_THROWS_AS(simulate(m, o, parse_fault("forge:1,z,0")), Error);
    CHECK_THROWS_AS(simulate(m, o, parse_fault("wrong-turn:2")), Error);
  }

  TEST_CASE("wrong turn off the map truncates the log with a warning") {
    TownMap m = load_town(kTwoNode);
    Simulation sim = simulate(m, load_objective(kForward), parse_fault("wrong-turn:1"));
    CHECK(!sim.completed);
    CHECK(!sim.warnings.empty());
    CHECK(sim.log.rows == Rows{{0, 0, 1, 0}, {0, 0, 1, 0}});
  }

  TEST_CASE("binding errors") {
    TownMap m = load_town(kTwoNode);
    CHECK_THROWS_AS(build_bindings(m, load_objective(R"({"sequence":[{"tag":9,"action":"left"}]})")), Error);
    m.start = Pose{5, 5, 0};
    CHECK_THROWS_WITH_AS(build_bindings(m, load_objective(kForward)), doctest::Contains("start node"), Error);
    m.start.reset();
    CHECK_THROWS_AS(build_bindings(m, load_objective(kForward)), Error);
  }

  TEST_CASE("fault syntax") {
    CHECK(parse_fault("wrong-turn:3").kind == Fault::Kind::WrongTurn);
    CHECK(parse_fault("wrong-turn:3").index == 3);
    Fault f = parse_fault("forge:2,k,-1");
    CHECK(f.kind == Fault::Kind::Forge);
    CHECK(f.var == "k");
    CHECK(f.value == -1);
    CHECK(parse_fault("skip:4").kind == Fault::Kind::Skip);
    CHECK(parse_fault("truncate:1").kind == Fault::Kind::Truncate);
    CHECK(parse_fault("").kind == Fault::Kind::None);
    for (const char* bad : {"wrong-turn", "wrong-turn:x", "forge:2,k", "explode:1", "skip:-1", "skip:0", "forge:0,x,1"}) {
      CHECK_THROWS_AS(parse_fault(bad), Error);
    }
  }

  TEST_CASE("bundled 5x5 town: honest run, faults and template pipeline") {
    TownMap m = load_town(read_file(TRACECHECK_DATA_DIR "/town5x5.json"));
    Objective o = load_objective(read_file(TRACECHECK_DATA_DIR "/objective4.json"));
    Simulation sim = simulate(m, o);
    CHECK(sim.completed);
    CHECK(sim.log.rows == Rows{{1, 0, 1, 0}, {2, 0, 1, 0}, {2, 1, 0, 1}, {2, 2, 0, 1}, {3, 2, 1, 2},
                               {4, 2, 1, 2}, {4, 3, 0, 3}, {4, 4, 0, 3}, {3, 4, 3, 4}, {3, 4, 3, 4}});
    TownModel tm = build_bindings(m, o);
    std::string text;
    render(tm.template_text, tm.bindings, tm.settings, &text);
    CHECK(text == build_model_text(m, o));
    CHECK(verdict(text, sim.log, PropertyType::Strong) == Verdict::Confirmed);
    CHECK(verdict(text, simulate(m, o, parse_fault("wrong-turn:2")).log, PropertyType::Strong) == Verdict::Rejected);
    CHECK(verdict(text, simulate(m, o, parse_fault("skip:4")).log, PropertyType::Weak) == Verdict::Confirmed);
    CHECK(verdict(text, simulate(m, o, parse_fault("skip:4")).log, PropertyType::Strong) == Verdict::Rejected);
  }

  TEST_CASE("random towns: honest round trip, determinism, single-forge detection") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 60; ++i) {
      tctest::Scenario sc = tctest::random_scenario(rng);
      INFO(town_to_json(sc.map) << objective_to_json(sc.objective));
      const std::string text = build_model_text(sc.map, sc.objective);
      CHECK(text == build_model_text(sc.map, sc.objective));
      SystemModel model = parse_model(text);
      StateGraph g = build_graph(model);
      const auto steps = static_cast<std::int64_t>(sc.objective.sequence.size());
      for (StateIndex s = 0; s < g.state_count(); ++s) {
        const Valuation& v = g.states()[s];
        CHECK(enabled_commands(model, v).size() == (v[3] < steps ? 1U : 0U));
      }
      Simulation sim = simulate(sc.map, sc.objective);
      REQUIRE(sim.completed);
      CHECK(verdict(text, sim.log, PropertyType::Strong) == Verdict::Confirmed);
      const std::size_t n = sim.log.rows.size();
      for (std::size_t row = 2; row < n; ++row) {
        std::size_t col = rng() % 4;
        ExecutionLog forged = sim.log;
        forged.rows[row - 1][col] += 1 + static_cast<std::int64_t>(rng() % 2);
        CHECK(verdict(text, forged, PropertyType::Strong) == Verdict::Rejected);
      }
    }
  }
}
