#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lexibr/dynamics.hpp"
#include "lexibr/game_model.hpp"
#include "lexibr/nlp.hpp"

namespace lexibr {

struct Opponent {
  Trajectory trajectory;
  double radius = 1.0;
};

// One agent's decomposed problem: opponents are fixed parameters.
struct BestResponseProblem {
  AgentSpec agent;
  Road road;
  double dt = 0.1;
  bool forward_only = true;
  int window_start = 0;
  AgentState measured_state;
  std::vector<Opponent> opponents;
  Trajectory warm_start;

  int horizon() const { return static_cast<int>(warm_start.size()); }
  // Throws std::invalid_argument on inconsistent lengths or an empty window.
  void validate() const;
};

// Row bookkeeping of a level program. Equalities: initial-state block then
// dynamics blocks. Inequalities in the order listed below; state-only rows
// cover steps 1..T-1 because x_0 is pinned by the initial-state equality.
struct ProgramLayout {
  int horizon = 0;
  int initial_rows = 0;
  int dynamics_rows = 0;
  int control_bound_rows = 0;
  int speed_rows = 0;
  int road_rows = 0;
  int collision_rows = 0;
  int level_bound_rows = 0;

  int num_eq() const { return initial_rows + dynamics_rows; }
  int num_ineq() const {
    return control_bound_rows + speed_rows + road_rows + collision_rows + level_bound_rows;
  }
  int level_bound_offset() const { return num_ineq() - level_bound_rows; }
};

struct LevelProgram {
  nlp::SmoothProgram program;
  ProgramLayout layout;
  std::vector<double> level_bound_rhs;  // y_j* + slack for j < k
};

// Slack added to every recorded optimum when it becomes a bound.
double level_slack(double optimum);

nlp::Vector pack(const Trajectory& traj);
Trajectory unpack(const nlp::Vector& z);

// Level k is 1-based; prior_optima holds y_1*..y_{k-1}*.
LevelProgram build_level_program(const BestResponseProblem& problem, int k,
                                 const std::vector<double>& prior_optima);

// Hard constraints only (dynamics, control bounds, speed, road, collision),
// i.e. the level-1 program. Used by the dominance and certificate checks.
LevelProgram build_constraint_program(const BestResponseProblem& problem);

struct LevelRecord {
  nlp::SolveStatus status = nlp::SolveStatus::kMaxIter;
  double cost = 0.0;
  double kkt_residual = 0.0;
  int inner_iterations = 0;
  int outer_iterations = 0;
  nlp::Vector point;
  nlp::Multipliers multipliers;
};

struct LexiSolution {
  Trajectory trajectory;
  std::vector<double> level_optima;
  std::vector<LevelRecord> levels;

  int total_inner_iterations() const;
};

class LevelInfeasibleError : public std::runtime_error {
 public:
  LevelInfeasibleError(int level, double residual);
  int level() const { return level_; }

 private:
  int level_;
};

// Solves levels 1..K in order with accumulated level-optimum bounds; each
// level starts from the previous level's point.
LexiSolution solve_lexicographic(const BestResponseProblem& problem,
                                 const nlp::SolverOptions& options = {});

// Level costs of an own window trajectory, in priority order.
std::vector<double> level_costs(const BestResponseProblem& problem, const Trajectory& traj);

struct DominanceOptions {
  int samples = 100;
  double control_halfwidth = 0.05;  // uniform noise on accel and yaw rate
  double tolerance = 1e-4;          // on level-cost changes
  double feasibility_tolerance = 1e-8;
  std::uint64_t seed = 0;
};

struct DominanceReport {
  int samples = 0;
  int infeasible = 0;  // violate a hard constraint; cannot dominate
  int counterexamples = 0;
  // Level (1-based) of the first counterexample found, 0 when there is none.
  int first_counterexample_level = 0;
};

// Sampled local check that no perturbation of `solution` dominates it.
// Each sample perturbs the controls (clipped to the box), re-rolls the window
// from the measured state and counts as a counterexample when it satisfies
// the hard constraints and, for some level j, lowers l_j by more than the
// tolerance while every higher level m < j keeps l_m <= y_m* + slack and
// rises by at most the tolerance.
DominanceReport check_dominance(const BestResponseProblem& problem, const LexiSolution& solution,
                                const DominanceOptions& options = {});

}  // namespace lexibr
