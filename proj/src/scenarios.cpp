#include "lexibr/scenarios.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lexibr {

namespace {

constexpr double kLaneSouth = -2.0;  // eastbound lane
constexpr double kLaneNorth = 2.0;
constexpr double kCarRadius = 1.0;
constexpr double kAmbulanceRadius = 1.25;
constexpr double kSpeedLimit = 10.0;

CostTerm term(CostTemplate kind, double weight, double target = 0.0) {
  return CostTerm{kind, weight, target};
}

PreferenceLevel level(std::initializer_list<CostTerm> terms) { return PreferenceLevel{terms}; }

GameConfig default_config() {
  GameConfig c;
  c.game_horizon = 60;
  c.window = 10;
  c.turn_length = 2;
  c.max_iterations = 1;
  c.epsilon = 1e-3;
  c.dt = 0.1;
  return c;
}

AgentSpec agent(int id, AgentState x0, double radius, PreferenceRelation prefs) {
  AgentSpec a;
  a.id = id;
  a.initial_state = x0;
  a.radius = radius;
  a.preferences = std::move(prefs);
  return a;
}

// Shared by highway and city.
std::vector<AgentState> two_way_initial_states() {
  return {
      AgentState{0.0, kLaneSouth, 0.0, 8.0},                // green car, eastbound
      AgentState{45.0, kLaneNorth, std::numbers::pi, 8.0},  // blue car, westbound
      AgentState{-14.0, kLaneSouth + 0.5, 0.0, 14.0},       // ambulance behind green, offset toward the centerline
  };
}

PreferenceRelation ambulance_preferences(double lane) {
  return PreferenceRelation{{
      level({term(CostTemplate::kProgress, 1.0, 16.0)}),
      level({term(CostTemplate::kRoadBoundary, 1.0), term(CostTemplate::kLaneDeviation, 1.0, lane)}),
      level({term(CostTemplate::kControlEffort, 0.1)}),
  }};
}

}  // namespace

Scenario build_highway() {
  Scenario s;
  s.name = "highway";
  s.config = default_config();
  s.road = Road{};
  const auto x0 = two_way_initial_states();
  auto car = [](double lane, double cruise) {
    return PreferenceRelation{{
        level({term(CostTemplate::kSpeedLimit, 1.0, kSpeedLimit)}),
        level({term(CostTemplate::kProgress, 1.0, cruise)}),
        level({term(CostTemplate::kLaneDeviation, 1.0, lane),
               term(CostTemplate::kRoadBoundary, 1.0),
               term(CostTemplate::kControlEffort, 0.1)}),
    }};
  };
  s.agents = {agent(0, x0[0], kCarRadius, car(kLaneSouth, 8.0)),
              agent(1, x0[1], kCarRadius, car(kLaneNorth, 8.0)),
              agent(2, x0[2], kAmbulanceRadius, ambulance_preferences(kLaneNorth))};
  return s;
}

Scenario build_city() {
  Scenario s = build_highway();
  s.name = "city";
  s.road.hard_boundary = true;
  // Crossing zones at the kerbs, clear of both centerlines.
  s.road.pedestrians = {Pedestrian{28.0, 4.6, 1.0}, Pedestrian{22.0, -4.6, 1.0}};
  auto car = [](double lane, double cruise) {
    return PreferenceRelation{{
        level({term(CostTemplate::kSpeedLimit, 1.0, kSpeedLimit),
               term(CostTemplate::kPedestrianClearance, 1.0, 0.5)}),
        level({term(CostTemplate::kLaneDeviation, 1.0, lane),
               term(CostTemplate::kRoadBoundary, 1.0)}),
        level({term(CostTemplate::kProgress, 1.0, cruise),
               term(CostTemplate::kControlEffort, 0.1)}),
    }};
  };
  s.agents[0].preferences = car(kLaneSouth, 8.0);
  s.agents[1].preferences = car(kLaneNorth, 8.0);
  return s;
}

Scenario build_overtaking(int K) {
  if (K != 2 && K != 3) throw std::invalid_argument("build_overtaking: K must be 2 or 3");
  Scenario s;
  s.name = "overtaking";
  s.config = default_config();
  s.road = Road{};
  auto car = [K](double lane, double cruise) {
    if (K == 2) {
      return PreferenceRelation{{
          level({term(CostTemplate::kSpeedLimit, 1.0, kSpeedLimit)}),
          level({term(CostTemplate::kProgress, 1.0, cruise),
                 term(CostTemplate::kLaneDeviation, 1.0, lane),
                 term(CostTemplate::kRoadBoundary, 1.0),
                 term(CostTemplate::kControlEffort, 0.1)}),
      }};
    }
    return PreferenceRelation{{
        level({term(CostTemplate::kSpeedLimit, 1.0, kSpeedLimit)}),
        level({term(CostTemplate::kProgress, 1.0, cruise)}),
        level({term(CostTemplate::kLaneDeviation, 1.0, lane),
               term(CostTemplate::kRoadBoundary, 1.0),
               term(CostTemplate::kControlEffort, 0.1)}),
    }};
  };
  // Targets sit at the bottom of the perturbed initial speeds, so the hinge
  // levels usually have a zero optimum and a band of speeds that attain it.
  // Strictly convex terms (lane, effort) only appear in the last level.
  auto ambulance = [K](double lane) {
    if (K == 2) {
      return PreferenceRelation{{
          level({term(CostTemplate::kProgress, 1.0, 13.5)}),
          level({term(CostTemplate::kLaneDeviation, 0.1, lane),
                 term(CostTemplate::kRoadBoundary, 1.0),
                 term(CostTemplate::kControlEffort, 0.1)}),
      }};
    }
    return PreferenceRelation{{
        level({term(CostTemplate::kProgress, 1.0, 13.5)}),
        level({term(CostTemplate::kRoadBoundary, 1.0)}),
        level({term(CostTemplate::kLaneDeviation, 0.1, lane),
               term(CostTemplate::kControlEffort, 0.1)}),
    }};
  };
  s.agents = {
      agent(0, AgentState{12.0, kLaneSouth, 0.0, 9.0}, kCarRadius, car(kLaneSouth, 8.5)),
      agent(1, AgentState{4.0, kLaneNorth, 0.0, 9.0}, kCarRadius, car(kLaneNorth, 8.5)),
      agent(2, AgentState{-6.0, kLaneSouth + 0.5, 0.0, 14.0}, kAmbulanceRadius, ambulance(kLaneSouth)),
  };
  return s;
}

double initial_margin(const Scenario& scenario) {
  double margin = std::numeric_limits<double>::infinity();
  const int N = scenario.num_agents();
  if (N >= 2) {
    std::vector<Decision> joint;
    std::vector<double> radii;
    for (const auto& a : scenario.agents) {
      joint.push_back(Decision{a.initial_state, {}});
      radii.push_back(a.radius);
    }
    for (double v : collision_inequalities(joint, radii)) margin = std::min(margin, v);
  }
  if (scenario.road.hard_boundary) {
    for (const auto& a : scenario.agents) {
      for (double v : road_inequalities(Decision{a.initial_state, {}}, scenario.road, a.radius)) {
        margin = std::min(margin, v);
      }
    }
  }
  return margin;
}

Scenario perturb(const Scenario& scenario, const PerturbationSpec& spec) {
  if (spec.position_halfwidth < 0.0 || spec.speed_halfwidth < 0.0) {
    throw std::invalid_argument("perturb: halfwidths must be non-negative");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  constexpr int kMaxDraws = 1000;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    Scenario out = scenario;
    for (auto& a : out.agents) {
      a.initial_state.px += spec.position_halfwidth * unit(rng);
      a.initial_state.py += spec.position_halfwidth * unit(rng);
      a.initial_state.speed += spec.speed_halfwidth * unit(rng);
      if (scenario.config.forward_only) a.initial_state.speed = std::max(0.0, a.initial_state.speed);
    }
    if (initial_margin(out) > 0.0) return out;
  }
  throw std::runtime_error("perturb: could not draw a feasible initial state");
}

}  // namespace lexibr
