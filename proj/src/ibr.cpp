#include "lexibr/ibr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>

namespace lexibr {

int StageMetrics::total_inner_iterations() const {
  int total = 0;
  for (const auto& agent : level_iterations) {
    for (int n : agent) total += n;
  }
  return total;
}

std::vector<ControlInput> shift_and_pad(const Trajectory& prev, int turn_length,
                                        PaddingPolicy policy) {
  const int T = static_cast<int>(prev.size());
  if (turn_length <= 0 || turn_length > T) {
    throw std::invalid_argument("shift_and_pad: need 0 < T_l <= T");
  }
  std::vector<ControlInput> out;
  out.reserve(prev.size());
  for (int t = turn_length; t < T; ++t) out.push_back(prev[t].control);
  ControlInput pad{};
  if (policy == PaddingPolicy::kRepeatLast && !out.empty()) pad = out.back();
  while (static_cast<int>(out.size()) < T) out.push_back(pad);
  return out;
}

JointStrategy predict_initial(const std::optional<JointStrategy>& prev,
                              std::span<const AgentState> measured, const Scenario& scenario,
                              int stage_time) {
  const auto& cfg = scenario.config;
  if (static_cast<int>(measured.size()) != scenario.num_agents()) {
    throw std::invalid_argument("predict_initial: one measured state per agent");
  }
  JointStrategy out;
  out.stage_time = stage_time;
  for (int i = 0; i < scenario.num_agents(); ++i) {
    std::vector<ControlInput> controls;
    if (prev && i < prev->num_agents() &&
        static_cast<int>(prev->trajectories[i].size()) == cfg.window) {
      controls = shift_and_pad(prev->trajectories[i], cfg.turn_length, cfg.padding);
    } else {
      controls.assign(static_cast<std::size_t>(cfg.window), ControlInput{});
    }
    out.trajectories.push_back(rollout(measured[i], controls, cfg.dt));
  }
  return out;
}

BestResponseProblem make_best_response_problem(const Scenario& scenario, int agent,
                                               const JointStrategy& current,
                                               std::span<const AgentState> measured) {
  BestResponseProblem p;
  p.agent = scenario.agents[static_cast<std::size_t>(agent)];
  p.road = scenario.road;
  p.dt = scenario.config.dt;
  p.forward_only = scenario.config.forward_only;
  p.window_start = current.stage_time;
  p.measured_state = measured[static_cast<std::size_t>(agent)];
  p.warm_start = current.trajectories[static_cast<std::size_t>(agent)];
  for (int j = 0; j < scenario.num_agents(); ++j) {
    if (j == agent) continue;
    p.opponents.push_back(Opponent{current.trajectories[static_cast<std::size_t>(j)],
                                   scenario.agents[static_cast<std::size_t>(j)].radius});
  }
  return p;
}

namespace {

struct AgentUpdate {
  std::optional<LexiSolution> solution;
  Trajectory trajectory;
};

AgentUpdate respond(const Scenario& scenario, int agent, const JointStrategy& current,
                    std::span<const AgentState> measured, const nlp::SolverOptions& options) {
  AgentUpdate up;
  try {
    const BestResponseProblem problem =
        make_best_response_problem(scenario, agent, current, measured);
    LexiSolution sol = solve_lexicographic(problem, options);
    up.trajectory = rollout(measured[static_cast<std::size_t>(agent)],
                            controls_of(sol.trajectory), scenario.config.dt);
    up.solution = std::move(sol);
  } catch (const LevelInfeasibleError&) {
    up.trajectory = current.trajectories[static_cast<std::size_t>(agent)];
  } catch (const NumericalError&) {
    up.trajectory = current.trajectories[static_cast<std::size_t>(agent)];
  }
  return up;
}

}  // namespace

RoundResult best_response_round(const JointStrategy& current, std::span<const AgentState> measured,
                                const Scenario& scenario, const nlp::SolverOptions& options) {
  const int N = scenario.num_agents();
  if (current.num_agents() != N || static_cast<int>(measured.size()) != N) {
    throw std::invalid_argument("best_response_round: agent count mismatch");
  }
  RoundResult out;
  out.joint = current;
  out.solutions.resize(static_cast<std::size_t>(N));
  if (scenario.config.round_mode == RoundMode::kGaussSeidel) {
    for (int i = 0; i < N; ++i) {
      AgentUpdate up = respond(scenario, i, out.joint, measured, options);
      out.degraded = out.degraded || !up.solution;
      out.joint.trajectories[static_cast<std::size_t>(i)] = std::move(up.trajectory);
      out.solutions[static_cast<std::size_t>(i)] = std::move(up.solution);
    }
  } else {
    std::vector<std::future<AgentUpdate>> pending;
    for (int i = 0; i < N; ++i) {
      pending.push_back(std::async(std::launch::async, [&, i] {
        return respond(scenario, i, current, measured, options);
      }));
    }
    for (int i = 0; i < N; ++i) {
      AgentUpdate up = pending[static_cast<std::size_t>(i)].get();
      out.degraded = out.degraded || !up.solution;
      out.joint.trajectories[static_cast<std::size_t>(i)] = std::move(up.trajectory);
      out.solutions[static_cast<std::size_t>(i)] = std::move(up.solution);
    }
  }
  return out;
}

double improvement(const JointStrategy& prev, const JointStrategy& next) {
  if (prev.num_agents() != next.num_agents()) {
    throw std::invalid_argument("improvement: agent count mismatch");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (int i = 0; i < prev.num_agents(); ++i) {
    const auto& a = prev.trajectories[static_cast<std::size_t>(i)];
    const auto& b = next.trajectories[static_cast<std::size_t>(i)];
    if (a.size() != b.size()) throw std::invalid_argument("improvement: horizon mismatch");
    for (std::size_t t = 0; t < a.size(); ++t) {
      const DecisionArray x = to_array(a[t]);
      const DecisionArray y = to_array(b[t]);
      for (int k = 0; k < kDecisionDim; ++k) {
        // Headings are compared on the circle.
        const double diff = k == 2 ? wrap_angle(x[k] - y[k]) : x[k] - y[k];
        total += std::abs(diff);
      }
      count += kDecisionDim;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

StageResult ibr_solve(const std::optional<JointStrategy>& prev, std::span<const AgentState> measured,
                      const Scenario& scenario, const nlp::SolverOptions& options,
                      int stage_time) {
  scenario.config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int N = scenario.num_agents();
  StageResult out;
  out.initial_guess = predict_initial(prev, measured, scenario, stage_time);
  out.metrics.level_iterations.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    out.metrics.level_iterations[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(scenario.agents[static_cast<std::size_t>(i)].preferences.depth()), 0);
  }
  JointStrategy current = out.initial_guess;
  for (int round = 0; round < scenario.config.max_iterations; ++round) {
    RoundResult r = best_response_round(current, measured, scenario, options);
    bool any_solved = false;
    for (int i = 0; i < N; ++i) {
      const auto& sol = r.solutions[static_cast<std::size_t>(i)];
      if (!sol) continue;
      any_solved = true;
      for (std::size_t k = 0; k < sol->levels.size(); ++k) {
        out.metrics.level_iterations[static_cast<std::size_t>(i)][k] += sol->levels[k].inner_iterations;
      }
    }
    if (round == 0 && !any_solved) {
      throw StageError("ibr_solve: every agent infeasible in the first round");
    }
    if (r.degraded) ++out.metrics.degraded_rounds;
    const double delta = improvement(current, r.joint);
    out.metrics.improvements.push_back(delta);
    out.metrics.iterations_used = round + 1;
    current = std::move(r.joint);
    out.last_solutions = std::move(r.solutions);
    if (delta < scenario.config.epsilon) {
      out.metrics.converged = !r.degraded;
      break;
    }
  }
  out.joint = std::move(current);
  out.metrics.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double AgentCertificate::max_residual() const {
  if (!solved) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double r : level_residuals) worst = std::max(worst, r);
  return worst;
}

std::vector<AgentCertificate> certify_stage(const Scenario& scenario, const JointStrategy& joint,
                                            std::span<const AgentState> measured,
                                            const nlp::SolverOptions& options) {
  std::vector<AgentCertificate> out(static_cast<std::size_t>(scenario.num_agents()));
  for (int i = 0; i < scenario.num_agents(); ++i) {
    auto& cert = out[static_cast<std::size_t>(i)];
    AgentUpdate up = respond(scenario, i, joint, measured, options);
    if (!up.solution) continue;
    cert.solved = true;
    for (const auto& level : up.solution->levels) cert.level_residuals.push_back(level.kkt_residual);
    JointStrategy moved = joint;
    const std::size_t n = moved.trajectories.size();
    moved.trajectories[static_cast<std::size_t>(i)] = up.trajectory;
    cert.displacement = improvement(joint, moved) * static_cast<double>(n);
  }
  return out;
}

}  // namespace lexibr
