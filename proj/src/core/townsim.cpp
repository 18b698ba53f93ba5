#include "tracecheck/townsim.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tracecheck/error.hpp"
#include "tracecheck/lang.hpp"

namespace tracecheck::town {

namespace {

constexpr std::array<const char*, 4> kHeadingNames{"north", "east", "south", "west"};
constexpr std::array<Action, 3> kActions{Action::Left, Action::Right, Action::Forward};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

std::string coord(int x, int y) { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }

}  // namespace

const char* action_name(Action a) {
  switch (a) {
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Forward: return "forward";
  }
  return "?";
}

int turn(int heading, Action a) {
  switch (a) {
    case Action::Left: return (heading + 3) % 4;
    case Action::Right: return (heading + 1) % 4;
    case Action::Forward: return heading;
  }
  return heading;
}

const Node* TownMap::node_at(int x, int y) const {
  for (const auto& n : nodes) {
    if (n.x == x && n.y == y) return &n;
  }
  return nullptr;
}

const Node* TownMap::tagged(int tag) const {
  if (tag <= 0) return nullptr;
  for (const auto& n : nodes) {
    if (n.tag == tag) return &n;
  }
  return nullptr;
}

bool TownMap::has_edge(int x, int y, int heading) const {
  const std::array<int, 2> from{x, y};
  const std::array<int, 2> to{x + kDx[heading], y + kDy[heading]};
  return std::any_of(edges.begin(), edges.end(), [&](const auto& e) { return e.first == from && e.second == to; });
}

void TownMap::validate() const {
  if (width < 1 || height < 1) invalid("town dimensions must be positive");
  std::set<std::pair<int, int>> seen;
  std::set<int> tags;
  for (const auto& n : nodes) {
    if (n.x < 0 || n.x >= width || n.y < 0 || n.y >= height) invalid("node " + coord(n.x, n.y) + " out of bounds");
    if (!seen.insert({n.x, n.y}).second) invalid("duplicate node " + coord(n.x, n.y));
    if (n.tag < 0) invalid("negative tag at " + coord(n.x, n.y));
    if (n.tag > 0 && !tags.insert(n.tag).second) invalid("duplicate tag " + std::to_string(n.tag));
  }
  std::set<std::pair<std::array<int, 2>, std::array<int, 2>>> edge_set;
  for (const auto& [from, to] : edges) {
    if (!node_at(from[0], from[1])) invalid("edge from undeclared node " + coord(from[0], from[1]));
    if (!node_at(to[0], to[1])) invalid("edge to undeclared node " + coord(to[0], to[1]));
    if (std::abs(from[0] - to[0]) + std::abs(from[1] - to[1]) != 1) {
      invalid("edge " + coord(from[0], from[1]) + "->" + coord(to[0], to[1]) + " joins non-adjacent nodes");
    }
    if (!edge_set.insert({from, to}).second) {
      invalid("duplicate edge " + coord(from[0], from[1]) + "->" + coord(to[0], to[1]));
    }
  }
  if (start) {
    if (!node_at(start->x, start->y)) invalid("start node " + coord(start->x, start->y) + " not declared");
    if (start->d < 0 || start->d > 3) invalid("start heading must be 0..3");
  }
}

namespace {

using nlohmann::json;

template <typename T>
T field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Parse, std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Parse, std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string(what) + ": " + e.what());
  }
}

std::array<int, 2> point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw Error(ErrorKind::Parse, std::string(what) + ": edge endpoints must be [x,y] integer pairs");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

Action parse_action(const std::string& s) {
  if (s == "left") return Action::Left;
  if (s == "right") return Action::Right;
  if (s == "forward") return Action::Forward;
  throw Error(ErrorKind::Parse, "objective: unknown action '" + s + "'");
}

}  // namespace

TownMap load_town(std::string_view json_text) {
  const json j = parse_json(json_text, "town");
  if (!j.is_object()) throw Error(ErrorKind::Parse, "town: expected a JSON object");
  TownMap map;
  map.width = field<int>(j, "width", "town");
  map.height = field<int>(j, "height", "town");
  const auto nodes = field<json>(j, "nodes", "town");
  if (!nodes.is_array()) throw Error(ErrorKind::Parse, "town: 'nodes' must be an array");
  for (const auto& n : nodes) {
    Node node;
    node.x = field<int>(n, "x", "town node");
    node.y = field<int>(n, "y", "town node");
    node.tag = n.contains("tag") ? field<int>(n, "tag", "town node") : 0;
    map.nodes.push_back(node);
  }
  const auto edges = field<json>(j, "edges", "town");
  if (!edges.is_array()) throw Error(ErrorKind::Parse, "town: 'edges' must be an array");
  for (const auto& e : edges) {
    map.edges.emplace_back(point(field<json>(e, "from", "town edge"), "town edge"),
                           point(field<json>(e, "to", "town edge"), "town edge"));
  }
  if (j.contains("start")) {
    const auto s = j.at("start");
    map.start = Pose{field<int>(s, "x", "town start"), field<int>(s, "y", "town start"), field<int>(s, "d", "town start")};
  }
  map.validate();
  return map;
}

Objective load_objective(std::string_view json_text) {
  const json j = parse_json(json_text, "objective");
  const auto seq = field<json>(j, "sequence", "objective");
  if (!seq.is_array()) throw Error(ErrorKind::Parse, "objective: 'sequence' must be an array");
  Objective obj;
  for (const auto& s : seq) {
    obj.sequence.push_back(Step{field<int>(s, "tag", "objective step"),
                                parse_action(field<std::string>(s, "action", "objective step"))});
  }
  if (obj.sequence.empty()) invalid("non-empty sequence required");
  return obj;
}

std::string town_to_json(const TownMap& map) {
  nlohmann::ordered_json j;
  j["width"] = map.width;
  j["height"] = map.height;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : map.nodes) j["nodes"].push_back({{"x", n.x}, {"y", n.y}, {"tag", n.tag}});
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [from, to] : map.edges) j["edges"].push_back({{"from", from}, {"to", to}});
  if (map.start) j["start"] = {{"x", map.start->x}, {"y", map.start->y}, {"d", map.start->d}};
  return j.dump() + "\n";
}

std::string objective_to_json(const Objective& objective) {
  nlohmann::ordered_json j;
  j["sequence"] = nlohmann::ordered_json::array();
  for (const auto& s : objective.sequence) j["sequence"].push_back({{"tag", s.tag}, {"action", action_name(s.action)}});
  return j.dump() + "\n";
}

namespace {

std::string move_update(int heading) {
  if (kDx[heading] != 0) return kDx[heading] > 0 ? "x'=x+1" : "x'=x-1";
  return kDy[heading] > 0 ? "y'=y+1" : "y'=y-1";
}

std::string stop_tag(Action a, int h) { return std::string("stop_") + action_name(a) + "_" + kHeadingNames[h]; }
std::string roam_tag(Action a, int h) { return std::string("roam_") + action_name(a) + "_" + kHeadingNames[h]; }
std::string transit_tag(int h) { return std::string("transit_") + kHeadingNames[h]; }

std::string make_template() {
  std::ostringstream t;
  t << "// Grid-town robot: (x,y) node, d heading (0=N,1=E,2=S,3=W),\n"
       "// k index of the next objective step.\n"
       "var x : 0..@max_x@ init @start_x@;\n"
       "var y : 0..@max_y@ init @start_y@;\n"
       "var d : 0..3 init @start_d@;\n"
       "var k : 0..@steps@ init 0;\n\n"
       "// Tagged stops: perform the current step's action and advance k.\n";
  for (Action a : kActions) {
    for (int h = 0; h < 4; ++h) {
      const int nd = turn(h, a);
      t << "[" << action_name(a) << "] @" << stop_tag(a, h) << "@ -> d'=" << nd << " & " << move_update(nd)
        << " & k'=k+1;\n";
    }
  }
  t << "\n// Untagged nodes: keep driving straight.\n";
  for (int h = 0; h < 4; ++h) t << "[transit] @" << transit_tag(h) << "@ -> " << move_update(h) << ";\n";
  t << "\n// Maneuvers outside the objective; k is not advanced.\n";
  for (Action a : kActions) {
    for (int h = 0; h < 4; ++h) {
      const int nd = turn(h, a);
      t << "[" << action_name(a) << "] @" << roam_tag(a, h) << "@ -> d'=" << nd << " & " << move_update(nd) << ";\n";
    }
  }
  return t.str();
}

std::string position_disjunction(const std::vector<std::string>& terms) {
  std::string out = "(";
  for (std::size_t i = 0; i < terms.size(); ++i) out += (i ? " | " : "") + terms[i];
  return out + ")";
}

std::string at(int x, int y) { return "x==" + std::to_string(x) + " & y==" + std::to_string(y); }

void check_inputs(const TownMap& map, const Objective& objective) {
  map.validate();
  if (!map.start) invalid("start node not declared");
  if (objective.sequence.empty()) invalid("non-empty sequence required");
  for (const auto& s : objective.sequence) {
    if (!map.tagged(s.tag)) invalid("objective references tag " + std::to_string(s.tag) + " absent from the map");
  }
}

}  // namespace

std::string_view town_template() {
  static const std::string text = make_template();
  return text;
}

TownModel build_bindings(const TownMap& map, const Objective& objective, BindingMode mode) {
  check_inputs(map, objective);
  TownModel out;
  out.template_text = std::string(town_template());
  const int steps = static_cast<int>(objective.sequence.size());
  out.settings.parameters = {
      {"max_x", std::int64_t{map.width - 1}}, {"max_y", std::int64_t{map.height - 1}},
      {"start_x", std::int64_t{map.start->x}}, {"start_y", std::int64_t{map.start->y}},
      {"start_d", std::int64_t{map.start->d}}, {"steps", std::int64_t{steps}},
  };
  for (const auto& tag : template_tags(town_template())) {
    if (!out.settings.parameters.count(tag)) out.settings.defaults[tag] = "false";
  }

  std::set<Action> used;
  for (const auto& s : objective.sequence) used.insert(s.action);
  const std::string in_progress = "k<" + std::to_string(steps);

  for (int h = 0; h < 4; ++h) {
    const std::string heading = "d==" + std::to_string(h);
    for (Action a : kActions) {
      std::vector<std::string> terms;
      const int nd = turn(h, a);
      for (int k = 0; k < steps; ++k) {
        const auto& s = objective.sequence[static_cast<std::size_t>(k)];
        const Node* n = map.tagged(s.tag);
        if (s.action == a && map.has_edge(n->x, n->y, nd)) terms.push_back("k==" + std::to_string(k) + " & " + at(n->x, n->y));
      }
      if (!terms.empty()) out.bindings[stop_tag(a, h)] = heading + " & " + position_disjunction(terms);

      if (mode == BindingMode::WithUnusedActions && !used.count(a)) {
        std::vector<std::string> roam;
        for (const auto& n : map.nodes) {
          if (n.tag > 0 && map.has_edge(n.x, n.y, nd)) roam.push_back(at(n.x, n.y));
        }
        if (!roam.empty()) out.bindings[roam_tag(a, h)] = heading + " & " + in_progress + " & " + position_disjunction(roam);
      }
    }
    std::vector<std::string> transit;
    for (const auto& n : map.nodes) {
      if (n.tag == 0 && map.has_edge(n.x, n.y, h)) transit.push_back(at(n.x, n.y));
    }
    if (!transit.empty()) out.bindings[transit_tag(h)] = heading + " & " + in_progress + " & " + position_disjunction(transit);
  }
  return out;
}

std::string build_model_text(const TownMap& map, const Objective& objective, BindingMode mode) {
  const TownModel tm = build_bindings(map, objective, mode);
  std::string text;
  render(tm.template_text, tm.bindings, tm.settings, &text);
  return text;
}

Fault parse_fault(std::string_view text) {
  Fault f;
  if (text.empty()) return f;
  auto bad = [&]() -> Fault { invalid("malformed fault spec '" + std::string(text) + "'"); };
  auto number = [&](std::string_view s, auto& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad();
  };
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) return bad();
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  if (kind == "wrong-turn" || kind == "skip" || kind == "truncate") {
    f.kind = kind == "wrong-turn" ? Fault::Kind::WrongTurn : kind == "skip" ? Fault::Kind::Skip : Fault::Kind::Truncate;
    number(args, f.index);
  } else if (kind == "forge") {
    f.kind = Fault::Kind::Forge;
    const std::size_t c1 = args.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : args.find(',', c1 + 1);
    if (c2 == std::string_view::npos) return bad();
    number(args.substr(0, c1), f.index);
    f.var = std::string(args.substr(c1 + 1, c2 - c1 - 1));
    number(args.substr(c2 + 1), f.value);
  } else {
    return bad();
  }
  if (f.index == 0) bad();  // rows and stops are numbered from 1
  return f;
}

Simulation simulate(const TownMap& map, const Objective& objective, const Fault& fault) {
  check_inputs(map, objective);
  const int steps = static_cast<int>(objective.sequence.size());
  if (fault.kind == Fault::Kind::WrongTurn && (fault.index < 1 || fault.index > objective.sequence.size())) {
    invalid("wrong-turn index " + std::to_string(fault.index) + " out of range 1.." + std::to_string(steps));
  }

  Simulation sim;
  sim.log.variables = {"x", "y", "d", "k"};
  RobotState s{map.start->x, map.start->y, map.start->d, 0};
  auto record = [&] { sim.log.rows.push_back({s.x, s.y, s.d, s.k}); };
  record();

  const std::size_t limit = (map.nodes.size() * 4 + 1) * static_cast<std::size_t>(steps + 1);
  for (std::size_t iter = 0; s.k < steps; ++iter) {
    if (iter > limit) {
      sim.warnings.push_back("step limit reached");
      break;
    }
    const Node* here = map.node_at(s.x, s.y);
    if (here->tag > 0) {
      const Step& step = objective.sequence[static_cast<std::size_t>(s.k)];
      if (here->tag != step.tag) {
        sim.warnings.push_back("halted at " + coord(s.x, s.y) + ": tag " + std::to_string(here->tag) +
                               " does not match step " + std::to_string(s.k + 1) + " (tag " +
                               std::to_string(step.tag) + ")");
        break;
      }
      Action action = step.action;
      if (fault.kind == Fault::Kind::WrongTurn && static_cast<std::size_t>(s.k + 1) == fault.index) {
        // First other action with an exit, else the first other action.
        std::optional<Action> pick;
        for (Action a : kActions) {
          if (a != step.action && map.has_edge(s.x, s.y, turn(s.d, a))) {
            pick = a;
            break;
          }
        }
        if (!pick) {
          for (Action a : kActions) {
            if (a != step.action) {
              pick = a;
              break;
            }
          }
        }
        action = *pick;
      }
      const int nd = turn(s.d, action);
      if (!map.has_edge(s.x, s.y, nd)) {
        if (action != step.action) {
          sim.warnings.push_back("wrong turn at " + coord(s.x, s.y) + " leads off the map; log truncated");
        } else {
          sim.warnings.push_back("halted at " + coord(s.x, s.y) + ": no exit for action " + action_name(action));
        }
        break;
      }
      s.x += kDx[nd];
      s.y += kDy[nd];
      s.d = nd;
      ++s.k;
    } else {
      if (!map.has_edge(s.x, s.y, s.d)) {
        sim.warnings.push_back("halted at " + coord(s.x, s.y) + ": no straight exit from untagged node");
        break;
      }
      s.x += kDx[s.d];
      s.y += kDy[s.d];
    }
    record();
  }
  sim.completed = s.k == steps;
  sim.log.rows.push_back(sim.log.rows.back());

  auto& rows = sim.log.rows;
  const std::size_t n = rows.size();
  switch (fault.kind) {
    case Fault::Kind::None:
    case Fault::Kind::WrongTurn:
      break;
    case Fault::Kind::Forge: {
      if (fault.index < 1 || fault.index > n) {
        invalid("forge row " + std::to_string(fault.index) + " out of range 1.." + std::to_string(n));
      }
      const auto& vars = sim.log.variables;
      auto it = std::find(vars.begin(), vars.end(), fault.var);
      if (it == vars.end()) invalid("forge: unknown column '" + fault.var + "'");
      auto& cell = rows[fault.index - 1][static_cast<std::size_t>(it - vars.begin())];
      if (cell == fault.value) {
        sim.warnings.push_back("forge leaves row " + std::to_string(fault.index) + " unchanged (" + fault.var +
                               " is already " + std::to_string(fault.value) + ")");
      }
      cell = fault.value;
      break;
    }
    case Fault::Kind::Skip:
      if (!(fault.index > 1 && fault.index + 1 < n)) {
        invalid("skip row " + std::to_string(fault.index) + " out of range: need 1 < i < " + std::to_string(n - 1) +
                " (no interior row to skip)");
      }
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(fault.index - 1));
      break;
    case Fault::Kind::Truncate:
      if (fault.index < 1 || fault.index + 2 > n) {
        invalid("truncate count " + std::to_string(fault.index) + " out of range: at most " +
                std::to_string(n >= 2 ? n - 2 : 0) + " rows can be dropped");
      }
      rows.resize(n - fault.index);
      break;
  }
  return sim;
}

}  // namespace tracecheck::town
