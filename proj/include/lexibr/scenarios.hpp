#pragma once

#include <cstdint>

#include "lexibr/game_model.hpp"

namespace lexibr {

// Two cars in opposite lanes and an ambulance closing from behind the
// eastbound car. Soft road boundary; cars rank keeping speed above staying in
// lane.
Scenario build_highway();

// Same geometry, states and agents as build_highway, plus pedestrian keep-out
// discs and a hard road corridor; cars rank clearance and lane keeping above
// keeping speed.
Scenario build_city();

// Two cars in parallel same-direction lanes and an ambulance overtaking them,
// with every agent's hierarchy truncated to depth K (2 or 3).
Scenario build_overtaking(int K);

struct PerturbationSpec {
  double position_halfwidth = 0.5;  // m
  double speed_halfwidth = 0.5;     // m/s
  std::uint64_t seed = 0;
};

// Uniform offsets on every agent's initial px, py and speed, redrawn until
// the initial state is feasible with a positive margin.
Scenario perturb(const Scenario& scenario, const PerturbationSpec& spec);

// Collision (and, for hard corridors, road) margins at the initial states.
double initial_margin(const Scenario& scenario);

}  // namespace lexibr
