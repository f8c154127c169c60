#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lexibr/dynamics.hpp"
#include "lexibr/game_model.hpp"
#include "lexibr/lexicographic.hpp"
#include "lexibr/nlp.hpp"

namespace lexibr {

// Per-agent window trajectories of one decision-making stage, in agent order.
struct JointStrategy {
  int stage_time = 0;
  std::vector<Trajectory> trajectories;

  int num_agents() const { return static_cast<int>(trajectories.size()); }
  int horizon() const { return trajectories.empty() ? 0 : static_cast<int>(trajectories[0].size()); }
};

struct StageMetrics {
  int iterations_used = 0;
  std::vector<double> improvements;  // one per completed round
  double solve_seconds = 0.0;
  // [agent][level] inner NLP iterations summed over the stage's rounds.
  std::vector<std::vector<int>> level_iterations;
  int degraded_rounds = 0;
  bool converged = false;  // a round's improvement fell below epsilon

  int total_inner_iterations() const;
};

struct RoundResult {
  JointStrategy joint;
  bool degraded = false;
  // Per agent; empty when that agent's solve failed and it kept its input.
  std::vector<std::optional<LexiSolution>> solutions;
};

struct StageResult {
  JointStrategy initial_guess;
  JointStrategy joint;
  StageMetrics metrics;
  std::vector<std::optional<LexiSolution>> last_solutions;
};

class StageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Drops the first turn_length controls of prev and appends turn_length
// padding controls: zeros (null action) or copies of the last kept control.
std::vector<ControlInput> shift_and_pad(const Trajectory& prev, int turn_length,
                                        PaddingPolicy policy);

// Rolls every agent's shifted-and-padded previous controls out from its
// measured state. Without a previous stage every control is the null action.
JointStrategy predict_initial(const std::optional<JointStrategy>& prev,
                              std::span<const AgentState> measured, const Scenario& scenario,
                              int stage_time = 0);

// Agent i's decomposed problem with every other trajectory of `current` fixed.
BestResponseProblem make_best_response_problem(const Scenario& scenario, int agent,
                                               const JointStrategy& current,
                                               std::span<const AgentState> measured);

// One pass over all agents in id order. Gauss-Seidel commits each response
// immediately; Jacobi solves every agent against `current` and commits at the
// end. Returned trajectories are re-rolled from the measured states so they
// satisfy the dynamics exactly.
RoundResult best_response_round(const JointStrategy& current, std::span<const AgentState> measured,
                                const Scenario& scenario, const nlp::SolverOptions& options = {});

// Mean absolute difference over every stacked decision variable.
double improvement(const JointStrategy& prev, const JointStrategy& next);

// One decision-making stage: prediction followed by up to L rounds, stopping
// early once a round's improvement drops below epsilon.
StageResult ibr_solve(const std::optional<JointStrategy>& prev, std::span<const AgentState> measured,
                      const Scenario& scenario, const nlp::SolverOptions& options = {},
                      int stage_time = 0);

struct AgentCertificate {
  bool solved = false;
  std::vector<double> level_residuals;  // KKT residual per level, priority order
  double displacement = 0.0;            // mean absolute move from the stage trajectory

  double max_residual() const;
};

// Re-solves every agent's lexicographic program with all opponents fixed at
// `joint`, warm-started from its own trajectory in `joint`. At an
// approximate equilibrium each agent barely moves and every level certifies.
std::vector<AgentCertificate> certify_stage(const Scenario& scenario, const JointStrategy& joint,
                                            std::span<const AgentState> measured,
                                            const nlp::SolverOptions& options = {});

}  // namespace lexibr
