#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexibr/dynamics.hpp"

namespace lexibr {

enum class PaddingPolicy { kNullAction, kRepeatLast };
enum class RoundMode { kGaussSeidel, kJacobi };

struct ControlBounds {
  ControlInput lower{-6.0, -1.0};
  ControlInput upper{3.0, 1.0};

  bool operator==(const ControlBounds&) const = default;
};

// Built-in per-step cost templates. All are non-negative, C1 in the decision.
//   lane_deviation        (py - target)^2
//   speed_limit           max(0, speed - target)^2
//   progress              max(0, target - speed)^2
//   control_effort        accel^2 + yaw_rate^2
//   pedestrian_clearance  sum over discs of max(0, radius + r_p + target - dist)^2
//   road_boundary         max(0, py + radius - y_max)^2 + max(0, y_min - py + radius)^2
enum class CostTemplate {
  kLaneDeviation,
  kSpeedLimit,
  kProgress,
  kControlEffort,
  kPedestrianClearance,
  kRoadBoundary,
};

inline constexpr CostTemplate kAllTemplates[] = {
    CostTemplate::kLaneDeviation,        CostTemplate::kSpeedLimit,
    CostTemplate::kProgress,             CostTemplate::kControlEffort,
    CostTemplate::kPedestrianClearance,  CostTemplate::kRoadBoundary,
};

std::string_view template_name(CostTemplate kind);
std::optional<CostTemplate> parse_template(std::string_view name);

struct CostTerm {
  CostTemplate kind = CostTemplate::kControlEffort;
  double weight = 1.0;
  double target = 0.0;

  bool operator==(const CostTerm&) const = default;
};

// One level of an agent's hierarchy; its cost is the sum of its terms over the
// window. Level position in PreferenceRelation::levels is its priority (front
// is highest).
struct PreferenceLevel {
  std::vector<CostTerm> terms;

  bool operator==(const PreferenceLevel&) const = default;
};

struct PreferenceRelation {
  std::vector<PreferenceLevel> levels;

  int depth() const { return static_cast<int>(levels.size()); }
  bool operator==(const PreferenceRelation&) const = default;
};

struct Pedestrian {
  double x = 0.0;
  double y = 0.0;
  double radius = 1.0;

  bool operator==(const Pedestrian&) const = default;
};

// Straight road along +x. The corridor [y_min, y_max] bounds the drivable
// surface; it is a hard constraint only when hard_boundary is set.
struct Road {
  std::vector<double> lane_centers{-2.0, 2.0};
  double lane_width = 4.0;
  double y_min = -4.0;
  double y_max = 4.0;
  std::vector<Pedestrian> pedestrians;
  bool hard_boundary = false;

  // Index of the lane whose centerline is nearest to y.
  int lane_of(double y) const;
  bool operator==(const Road&) const = default;
};

struct AgentSpec {
  int id = 0;
  AgentState initial_state;
  double radius = 1.0;
  ControlBounds control_bounds;
  PreferenceRelation preferences;

  bool operator==(const AgentSpec&) const = default;
};

struct GameConfig {
  int game_horizon = 60;   // T_g, steps
  int window = 10;         // T, steps
  int turn_length = 2;     // T_l, steps
  int max_iterations = 1;  // L
  double epsilon = 1e-3;
  double dt = 0.1;
  PaddingPolicy padding = PaddingPolicy::kNullAction;
  RoundMode round_mode = RoundMode::kGaussSeidel;
  bool forward_only = true;

  // Throws std::invalid_argument when an invariant is broken.
  void validate() const;
  bool operator==(const GameConfig&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<AgentSpec> agents;
  Road road;
  GameConfig config;

  int num_agents() const { return static_cast<int>(agents.size()); }
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

// ||p_i - p_j||^2 - (r_i + r_j)^2 for every pair i < j, in (0,1), (0,2), ...,
// (1,2), ... order.
std::vector<double> collision_inequalities(std::span<const Decision> joint,
                                           std::span<const double> radii);

// Single-pair margin with its gradient w.r.t. the first agent's (px, py).
double collision_margin(const Decision& own, const Decision& other, double radius_sum,
                        double* grad_px = nullptr, double* grad_py = nullptr);

// [y_max - radius - py, py - y_min - radius, then one row per pedestrian:
//  dist(p, c) - radius - r_p]. All >= 0 iff the disc is on the road and clear
// of every keep-out disc.
std::vector<double> road_inequalities(const Decision& decision, const Road& road,
                                      double radius);
int num_road_inequalities(const Road& road);
// Writes d(row)/d(px, py) for each road row into jac (2 entries per row).
void road_inequality_gradients(const Decision& decision, const Road& road,
                               std::span<double> jac);

struct CostContext {
  const Road* road = nullptr;
  double radius = 1.0;
};

// Weighted per-decision value; when grad is non-empty (size kDecisionDim) the
// term's gradient is accumulated into it.
double term_value(const CostTerm& term, const Decision& d, const CostContext& ctx,
                  std::span<double> grad = {});

// Sum over the window of every term of the level. Throws NumericalError on a
// non-finite result.
double evaluate_level_cost(const PreferenceLevel& level, const Trajectory& window,
                           const CostContext& ctx);

// Same value; grad (size kDecisionDim * window.size()) receives the gradient
// w.r.t. the stacked decisions.
double evaluate_level_cost(const PreferenceLevel& level, const Trajectory& window,
                           const CostContext& ctx, std::span<double> grad);

// Adds the term's 6x6 Hessian at d (row-major) to hess.
void term_hessian(const CostTerm& term, const Decision& d, const CostContext& ctx,
                  std::span<double> hess);

// Block-diagonal Hessian of the level cost: one row-major 6x6 block per step,
// so blocks has 36 * window.size() entries. Overwritten, not accumulated.
void level_cost_hessian(const PreferenceLevel& level, const Trajectory& window,
                        const CostContext& ctx, std::span<double> blocks);

// Second derivatives of a pedestrian row dist(p, c) - r - r_p w.r.t. (px, py):
// writes [hxx, hxy, hyy].
void pedestrian_row_hessian(const Decision& d, const Pedestrian& p, std::span<double, 3> out);

}  // namespace lexibr
