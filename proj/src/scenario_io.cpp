#include "lexibr/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include "json.hpp"
#include <sstream>

namespace lexibr {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) throw ScenarioFormatError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || key == k;
    if (!known) throw ScenarioFormatError(std::string(where) + ": unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ScenarioFormatError(std::string(where) + ": missing key '" + key + "'");
  }
  return *it;
}

double number(const json& v, const char* where) {
  if (!v.is_number()) throw ScenarioFormatError(std::string(where) + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const char* where) {
  if (!v.is_number_integer()) throw ScenarioFormatError(std::string(where) + ": expected an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, std::size_t n, const char* where) {
  if (!v.is_array() || (n > 0 && v.size() != n)) {
    throw ScenarioFormatError(std::string(where) + ": expected an array of " + std::to_string(n) +
                              " numbers");
  }
  std::vector<double> out;
  for (const auto& e : v) out.push_back(number(e, where));
  return out;
}

CostTerm parse_term(const json& j) {
  check_keys(j, {"template", "weight", "target"}, "preference term");
  const json& name = require(j, "template", "preference term");
  if (!name.is_string()) throw ScenarioFormatError("preference term: template must be a string");
  auto kind = parse_template(name.get<std::string>());
  if (!kind) throw ScenarioFormatError("preference term: unknown template '" + name.get<std::string>() + "'");
  CostTerm t;
  t.kind = *kind;
  if (j.contains("weight")) t.weight = number(j["weight"], "preference term weight");
  if (j.contains("target")) t.target = number(j["target"], "preference term target");
  return t;
}

AgentSpec parse_agent(const json& j) {
  check_keys(j, {"id", "initial_state", "radius", "control_bounds", "preference"}, "agent");
  AgentSpec a;
  a.id = integer(require(j, "id", "agent"), "agent id");
  const auto x = numbers(require(j, "initial_state", "agent"), 4, "agent initial_state");
  a.initial_state = AgentState{x[0], x[1], x[2], x[3]};
  a.radius = number(require(j, "radius", "agent"), "agent radius");
  if (j.contains("control_bounds")) {
    const json& b = j["control_bounds"];
    check_keys(b, {"accel", "yaw_rate"}, "control_bounds");
    const auto acc = numbers(require(b, "accel", "control_bounds"), 2, "control_bounds accel");
    const auto yaw = numbers(require(b, "yaw_rate", "control_bounds"), 2, "control_bounds yaw_rate");
    a.control_bounds.lower = ControlInput{acc[0], yaw[0]};
    a.control_bounds.upper = ControlInput{acc[1], yaw[1]};
  }
  const json& pref = require(j, "preference", "agent");
  if (!pref.is_array()) throw ScenarioFormatError("agent preference: expected an array of levels");
  for (const auto& lv : pref) {
    if (!lv.is_array()) throw ScenarioFormatError("agent preference: each level is an array of terms");
    PreferenceLevel level;
    for (const auto& t : lv) level.terms.push_back(parse_term(t));
    a.preferences.levels.push_back(std::move(level));
  }
  return a;
}

Road parse_road(const json& j) {
  check_keys(j, {"lane_centers", "lane_width", "corridor", "pedestrians", "hard_boundary"}, "road");
  Road r;
  r.lane_centers = numbers(require(j, "lane_centers", "road"), 0, "road lane_centers");
  r.lane_width = number(require(j, "lane_width", "road"), "road lane_width");
  const auto corridor = numbers(require(j, "corridor", "road"), 2, "road corridor");
  r.y_min = corridor[0];
  r.y_max = corridor[1];
  if (j.contains("pedestrians")) {
    if (!j["pedestrians"].is_array()) throw ScenarioFormatError("road pedestrians: expected an array");
    for (const auto& p : j["pedestrians"]) {
      check_keys(p, {"center", "radius"}, "pedestrian");
      const auto c = numbers(require(p, "center", "pedestrian"), 2, "pedestrian center");
      r.pedestrians.push_back(Pedestrian{c[0], c[1], number(require(p, "radius", "pedestrian"), "pedestrian radius")});
    }
  }
  if (j.contains("hard_boundary")) {
    if (!j["hard_boundary"].is_boolean()) throw ScenarioFormatError("road hard_boundary: expected a boolean");
    r.hard_boundary = j["hard_boundary"].get<bool>();
  }
  return r;
}

GameConfig parse_config(const json& j) {
  check_keys(j, {"T_g", "T", "T_l", "L", "epsilon", "dt", "padding", "round_mode", "forward_only"},
             "config");
  GameConfig c;
  c.game_horizon = integer(require(j, "T_g", "config"), "config T_g");
  c.window = integer(require(j, "T", "config"), "config T");
  c.turn_length = integer(require(j, "T_l", "config"), "config T_l");
  c.max_iterations = integer(require(j, "L", "config"), "config L");
  c.epsilon = number(require(j, "epsilon", "config"), "config epsilon");
  c.dt = number(require(j, "dt", "config"), "config dt");
  const json& pad = require(j, "padding", "config");
  if (pad == "null_action") {
    c.padding = PaddingPolicy::kNullAction;
  } else if (pad == "repeat_last") {
    c.padding = PaddingPolicy::kRepeatLast;
  } else {
    throw ScenarioFormatError("config padding: expected null_action or repeat_last");
  }
  if (j.contains("round_mode")) {
    const json& mode = j["round_mode"];
    if (mode == "gauss_seidel") {
      c.round_mode = RoundMode::kGaussSeidel;
    } else if (mode == "jacobi") {
      c.round_mode = RoundMode::kJacobi;
    } else {
      throw ScenarioFormatError("config round_mode: expected gauss_seidel or jacobi");
    }
  }
  if (j.contains("forward_only")) {
    if (!j["forward_only"].is_boolean()) throw ScenarioFormatError("config forward_only: expected a boolean");
    c.forward_only = j["forward_only"].get<bool>();
  }
  return c;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioFormatError(std::string("scenario: malformed JSON: ") + e.what());
  }
  check_keys(j, {"name", "agents", "road", "config"}, "scenario");
  Scenario s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ScenarioFormatError("scenario name: expected a string");
    s.name = j["name"].get<std::string>();
  }
  const json& agents = require(j, "agents", "scenario");
  if (!agents.is_array()) throw ScenarioFormatError("scenario agents: expected an array");
  for (const auto& a : agents) s.agents.push_back(parse_agent(a));
  s.road = parse_road(require(j, "road", "scenario"));
  s.config = parse_config(require(j, "config", "scenario"));
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioFormatError(e.what());
  }
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["agents"] = json::array();
  for (const auto& a : s.agents) {
    json levels = json::array();
    for (const auto& level : a.preferences.levels) {
      json terms = json::array();
      for (const auto& t : level.terms) {
        terms.push_back({{"template", std::string(template_name(t.kind))},
                         {"weight", t.weight},
                         {"target", t.target}});
      }
      levels.push_back(terms);
    }
    const auto& x = a.initial_state;
    const auto& b = a.control_bounds;
    j["agents"].push_back({{"id", a.id},
                           {"initial_state", {x.px, x.py, x.heading, x.speed}},
                           {"radius", a.radius},
                           {"control_bounds",
                            {{"accel", {b.lower.accel, b.upper.accel}},
                             {"yaw_rate", {b.lower.yaw_rate, b.upper.yaw_rate}}}},
                           {"preference", levels}});
  }
  json peds = json::array();
  for (const auto& p : s.road.pedestrians) peds.push_back({{"center", {p.x, p.y}}, {"radius", p.radius}});
  j["road"] = {{"lane_centers", s.road.lane_centers},
               {"lane_width", s.road.lane_width},
               {"corridor", {s.road.y_min, s.road.y_max}},
               {"pedestrians", peds},
               {"hard_boundary", s.road.hard_boundary}};
  const auto& c = s.config;
  j["config"] = {{"T_g", c.game_horizon},
                 {"T", c.window},
                 {"T_l", c.turn_length},
                 {"L", c.max_iterations},
                 {"epsilon", c.epsilon},
                 {"dt", c.dt},
                 {"padding", c.padding == PaddingPolicy::kNullAction ? "null_action" : "repeat_last"},
                 {"round_mode", c.round_mode == RoundMode::kGaussSeidel ? "gauss_seidel" : "jacobi"},
                 {"forward_only", c.forward_only}};
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scenario: cannot open " + path.string());
  out << serialize_scenario(scenario);
  if (!out) throw std::runtime_error("save_scenario: write failed for " + path.string());
}

}  // namespace lexibr
