#include "lexibr/receding_horizon.hpp"

#include <algorithm>
#include <stdexcept>

namespace lexibr {

std::vector<AgentState> advance(std::span<const AgentState> states, const JointStrategy& stage,
                                int steps, double dt) {
  if (steps <= 0) throw std::invalid_argument("advance: need a positive step count");
  if (static_cast<int>(states.size()) != stage.num_agents()) {
    throw std::invalid_argument("advance: agent count mismatch");
  }
  std::vector<AgentState> out(states.begin(), states.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& traj = stage.trajectories[i];
    if (static_cast<int>(traj.size()) < steps) {
      throw std::invalid_argument("advance: stage shorter than the step count");
    }
    for (int t = 0; t < steps; ++t) out[i] = step(out[i], traj[static_cast<std::size_t>(t)].control, dt);
  }
  return out;
}

int stage_count(const GameConfig& config) {
  return (config.game_horizon + config.turn_length - 1) / config.turn_length;
}

GameRun run_game(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const auto& cfg = scenario.config;
  const int N = scenario.num_agents();
  GameRun run;
  run.executed.resize(static_cast<std::size_t>(N));

  std::vector<AgentState> x;
  for (const auto& a : scenario.agents) x.push_back(a.initial_state);
  std::optional<JointStrategy> previous;
  int t = 0;
  int stage = 0;
  while (t < cfg.game_horizon) {
    const std::vector<AgentState> measured = x;
    StageResult result;
    try {
      result = ibr_solve(previous, measured, scenario, options.solver, t);
    } catch (const std::exception& e) {
      run.diagnostic = "stage " + std::to_string(stage) + " at t=" + std::to_string(t) + ": " + e.what();
      return run;
    }
    if (options.observer) {
      options.observer(StageContext{stage, t, measured, &previous, &result});
    }
    const int steps = std::min(cfg.turn_length, cfg.game_horizon - t);
    for (int i = 0; i < N; ++i) {
      const auto& traj = result.joint.trajectories[static_cast<std::size_t>(i)];
      auto& exec = run.executed[static_cast<std::size_t>(i)];
      exec.insert(exec.end(), traj.begin(), traj.begin() + steps);
    }
    x = advance(measured, result.joint, steps, cfg.dt);
    if (options.disturbance) {
      for (int i = 0; i < N; ++i) {
        x[static_cast<std::size_t>(i)] = options.disturbance(i, t + steps, x[static_cast<std::size_t>(i)]);
      }
    }
    run.stage_metrics.push_back(result.metrics);
    run.stage_solutions.push_back(result.joint);
    previous = std::move(result.joint);
    t += steps;
    ++stage;
  }
  run.complete = true;
  return run;
}

}  // namespace lexibr
