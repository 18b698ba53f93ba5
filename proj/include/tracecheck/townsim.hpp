#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracecheck/property.hpp"
#include "tracecheck/template.hpp"

namespace tracecheck::town {

// Headings: 0 north (y+1), 1 east (x+1), 2 south (y-1), 3 west (x-1).
inline constexpr std::array<int, 4> kDx{0, 1, 0, -1};
inline constexpr std::array<int, 4> kDy{1, 0, -1, 0};

enum class Action { Left, Right, Forward };

const char* action_name(Action a);
int turn(int heading, Action a);

struct Node {
  int x = 0;
  int y = 0;
  int tag = 0;  // 0 = untagged
};

struct Pose {
  int x = 0;
  int y = 0;
  int d = 0;
};

class TownMap {
 public:
  int width = 0;
  int height = 0;
  std::vector<Node> nodes;
  std::vector<std::pair<std::array<int, 2>, std::array<int, 2>>> edges;  // directed
  std::optional<Pose> start;

  // Checks coordinates, adjacency, tag uniqueness; throws Error(InvalidArgument).
  void validate() const;

  const Node* node_at(int x, int y) const;
  const Node* tagged(int tag) const;
  bool has_edge(int x, int y, int heading) const;
};

struct Step {
  int tag = 0;
  Action action = Action::Forward;
};

struct Objective {
  std::vector<Step> sequence;
};

struct RobotState {
  int x = 0;
  int y = 0;
  int d = 0;
  int k = 0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

TownMap load_town(std::string_view json_text);
Objective load_objective(std::string_view json_text);
std::string town_to_json(const TownMap& map);
std::string objective_to_json(const Objective& objective);

// The fixed town template: variables x, y, d, k and one command per
// (stop action, arrival heading), per transit heading and per roaming
// maneuver. Guards are tags resolved by the bindings.
std::string_view town_template();

struct TownModel {
  std::string template_text;
  Settings settings;
  Bindings bindings;
};

enum class BindingMode {
  // Only the objective's own steps and transit moves. Every roaming tag is
  // left to its "false" default.
  Reduced,
  // Additionally binds roaming maneuvers for actions the objective never
  // uses: the robot may perform them at any tagged intersection without
  // consuming an objective step.
  WithUnusedActions,
};

TownModel build_bindings(const TownMap& map, const Objective& objective, BindingMode mode = BindingMode::Reduced);
// Renders build_bindings output into model text.
std::string build_model_text(const TownMap& map, const Objective& objective, BindingMode mode = BindingMode::Reduced);

struct Fault {
  enum class Kind { None, WrongTurn, Forge, Skip, Truncate };
  Kind kind = Kind::None;
  std::size_t index = 0;  // J or I, 1-based
  std::string var;        // forge
  std::int64_t value = 0;  // forge
};

// Parses `wrong-turn:J`, `forge:I,VAR,VAL`, `skip:I`, `truncate:J`; empty
// text means no fault.
Fault parse_fault(std::string_view text);

struct Simulation {
  ExecutionLog log;  // columns x, y, d, k
  bool completed = false;  // reached k == |sequence|
  std::vector<std::string> warnings;
};

// Deterministic robot run from the map's start pose. The terminal row is
// duplicated once. Faults either divert the run (wrong-turn) or post-process
// the honest log.
Simulation simulate(const TownMap& map, const Objective& objective, const Fault& fault = {});

}  // namespace tracecheck::town
