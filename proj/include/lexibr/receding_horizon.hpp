#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexibr/ibr.hpp"

namespace lexibr {

struct GameRun {
  std::vector<Trajectory> executed;  // per agent, T_g decisions when complete
  std::vector<StageMetrics> stage_metrics;
  std::vector<JointStrategy> stage_solutions;
  bool complete = false;
  std::string diagnostic;
};

// Handed to the observer after every solved stage, before the plant moves.
struct StageContext {
  int stage_index = 0;
  int time = 0;
  std::span<const AgentState> measured;
  const std::optional<JointStrategy>* previous = nullptr;
  const StageResult* result = nullptr;
};

struct RunOptions {
  nlp::SolverOptions solver;
  std::function<void(const StageContext&)> observer;
  // Applied to every agent's state after each executed step; identity when
  // empty, so the plant matches the planning model.
  std::function<AgentState(int agent, int time, const AgentState&)> disturbance;
};

// Applies the first `steps` controls of each agent's stage trajectory.
std::vector<AgentState> advance(std::span<const AgentState> states, const JointStrategy& stage,
                                int steps, double dt);

// Measure, solve a stage, execute T_l steps, recede; the last stage is cut to
// the remaining T_g - t steps. A stage failure returns the partial run with
// complete = false.
GameRun run_game(const Scenario& scenario, const RunOptions& options = {});

int stage_count(const GameConfig& config);

}  // namespace lexibr
