#include "lexibr/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lexibr {

namespace {

double hinge(double v) { return v > 0.0 ? v : 0.0; }

// Keeps the distance differentiable at coincident centres.
constexpr double kDistanceFloor = 1e-12;

}  // namespace

std::string_view template_name(CostTemplate kind) {
  switch (kind) {
    case CostTemplate::kLaneDeviation: return "lane_deviation";
    case CostTemplate::kSpeedLimit: return "speed_limit";
    case CostTemplate::kProgress: return "progress";
    case CostTemplate::kControlEffort: return "control_effort";
    case CostTemplate::kPedestrianClearance: return "pedestrian_clearance";
    case CostTemplate::kRoadBoundary: return "road_boundary";
  }
  return "unknown";
}

std::optional<CostTemplate> parse_template(std::string_view name) {
  for (CostTemplate kind : kAllTemplates) {
    if (template_name(kind) == name) return kind;
  }
  return std::nullopt;
}

int Road::lane_of(double y) const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(lane_centers.size()); ++i) {
    if (std::abs(lane_centers[i] - y) < std::abs(lane_centers[best] - y)) best = i;
  }
  return best;
}

void GameConfig::validate() const {
  if (turn_length <= 0 || turn_length > window || window > game_horizon) {
    throw std::invalid_argument("GameConfig: need 0 < T_l <= T <= T_g");
  }
  if (max_iterations < 1) throw std::invalid_argument("GameConfig: L must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("GameConfig: epsilon must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("GameConfig: dt must be finite and > 0");
  }
}

void Scenario::validate() const {
  if (agents.empty()) throw std::invalid_argument("Scenario: needs at least one agent");
  if (!(road.lane_width > 0.0)) throw std::invalid_argument("Scenario: lane width must be > 0");
  if (!(road.y_max > road.y_min)) throw std::invalid_argument("Scenario: empty road corridor");
  if (road.lane_centers.empty()) throw std::invalid_argument("Scenario: no lanes");
  for (const auto& p : road.pedestrians) {
    if (!(p.radius > 0.0)) throw std::invalid_argument("Scenario: pedestrian radius must be > 0");
  }
  std::set<int> ids;
  for (const auto& a : agents) {
    if (!ids.insert(a.id).second) throw std::invalid_argument("Scenario: duplicate agent id");
    if (!(a.radius > 0.0)) throw std::invalid_argument("Scenario: agent radius must be > 0");
    if (a.preferences.depth() < 1) {
      throw std::invalid_argument("Scenario: every agent needs at least one preference level");
    }
    if (!is_finite(a.initial_state)) throw std::invalid_argument("Scenario: non-finite state");
    const auto& b = a.control_bounds;
    if (b.lower.accel > b.upper.accel || b.lower.yaw_rate > b.upper.yaw_rate) {
      throw std::invalid_argument("Scenario: inverted control bounds");
    }
    for (const auto& level : a.preferences.levels) {
      for (const auto& t : level.terms) {
        if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
          throw std::invalid_argument("Scenario: cost weights must be finite and >= 0");
        }
      }
    }
  }
  config.validate();
}

double collision_margin(const Decision& own, const Decision& other, double radius_sum,
                        double* grad_px, double* grad_py) {
  const double dx = own.state.px - other.state.px;
  const double dy = own.state.py - other.state.py;
  if (grad_px) *grad_px = 2.0 * dx;
  if (grad_py) *grad_py = 2.0 * dy;
  return dx * dx + dy * dy - radius_sum * radius_sum;
}

std::vector<double> collision_inequalities(std::span<const Decision> joint,
                                           std::span<const double> radii) {
  if (joint.size() < 2) throw std::invalid_argument("collision_inequalities: need >= 2 agents");
  if (joint.size() != radii.size()) {
    throw std::invalid_argument("collision_inequalities: one radius per agent");
  }
  std::vector<double> out;
  out.reserve(joint.size() * (joint.size() - 1) / 2);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    for (std::size_t j = i + 1; j < joint.size(); ++j) {
      out.push_back(collision_margin(joint[i], joint[j], radii[i] + radii[j]));
    }
  }
  return out;
}

int num_road_inequalities(const Road& road) {
  return 2 + static_cast<int>(road.pedestrians.size());
}

std::vector<double> road_inequalities(const Decision& d, const Road& road, double radius) {
  std::vector<double> out;
  out.reserve(num_road_inequalities(road));
  out.push_back(road.y_max - radius - d.state.py);
  out.push_back(d.state.py - road.y_min - radius);
  for (const auto& p : road.pedestrians) {
    const double dist = std::hypot(d.state.px - p.x, d.state.py - p.y);
    out.push_back(dist - radius - p.radius);
  }
  return out;
}

void road_inequality_gradients(const Decision& d, const Road& road, std::span<double> jac) {
  jac[0] = 0.0;
  jac[1] = -1.0;
  jac[2] = 0.0;
  jac[3] = 1.0;
  std::size_t row = 2;
  for (const auto& p : road.pedestrians) {
    const double dx = d.state.px - p.x;
    const double dy = d.state.py - p.y;
    const double dist = std::max(std::hypot(dx, dy), kDistanceFloor);
    jac[2 * row] = dx / dist;
    jac[2 * row + 1] = dy / dist;
    ++row;
  }
}

double term_value(const CostTerm& term, const Decision& d, const CostContext& ctx,
                  std::span<double> grad) {
  const bool want_grad = !grad.empty();
  const double w = term.weight;
  const auto& s = d.state;
  switch (term.kind) {
    case CostTemplate::kLaneDeviation: {
      const double e = s.py - term.target;
      if (want_grad) grad[1] += 2.0 * w * e;
      return w * e * e;
    }
    case CostTemplate::kSpeedLimit: {
      const double e = hinge(s.speed - term.target);
      if (want_grad) grad[3] += 2.0 * w * e;
      return w * e * e;
    }
    case CostTemplate::kProgress: {
      const double e = hinge(term.target - s.speed);
      if (want_grad) grad[3] -= 2.0 * w * e;
      return w * e * e;
    }
    case CostTemplate::kControlEffort: {
      const auto& u = d.control;
      if (want_grad) {
        grad[4] += 2.0 * w * u.accel;
        grad[5] += 2.0 * w * u.yaw_rate;
      }
      return w * (u.accel * u.accel + u.yaw_rate * u.yaw_rate);
    }
    case CostTemplate::kPedestrianClearance: {
      if (ctx.road == nullptr) return 0.0;
      double total = 0.0;
      for (const auto& p : ctx.road->pedestrians) {
        const double dx = s.px - p.x;
        const double dy = s.py - p.y;
        const double dist = std::max(std::hypot(dx, dy), kDistanceFloor);
        const double e = hinge(ctx.radius + p.radius + term.target - dist);
        total += e * e;
        if (want_grad && e > 0.0) {
          grad[0] -= 2.0 * w * e * dx / dist;
          grad[1] -= 2.0 * w * e * dy / dist;
        }
      }
      return w * total;
    }
    case CostTemplate::kRoadBoundary: {
      if (ctx.road == nullptr) return 0.0;
      const double top = hinge(s.py + ctx.radius - ctx.road->y_max);
      const double bottom = hinge(ctx.road->y_min - s.py + ctx.radius);
      if (want_grad) grad[1] += 2.0 * w * (top - bottom);
      return w * (top * top + bottom * bottom);
    }
  }
  return 0.0;
}

double evaluate_level_cost(const PreferenceLevel& level, const Trajectory& window,
                           const CostContext& ctx) {
  double total = 0.0;
  for (const auto& d : window) {
    for (const auto& term : level.terms) total += term_value(term, d, ctx);
  }
  if (!std::isfinite(total)) throw NumericalError("evaluate_level_cost: non-finite cost");
  return total;
}

double evaluate_level_cost(const PreferenceLevel& level, const Trajectory& window,
                           const CostContext& ctx, std::span<double> grad) {
  if (grad.size() != window.size() * kDecisionDim) {
    throw std::invalid_argument("evaluate_level_cost: gradient size mismatch");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < window.size(); ++t) {
    auto g = grad.subspan(t * kDecisionDim, kDecisionDim);
    for (const auto& term : level.terms) total += term_value(term, window[t], ctx, g);
  }
  if (!std::isfinite(total)) throw NumericalError("evaluate_level_cost: non-finite cost");
  return total;
}

void term_hessian(const CostTerm& term, const Decision& d, const CostContext& ctx,
                  std::span<double> hess) {
  if (hess.size() != kDecisionDim * kDecisionDim) {
    throw std::invalid_argument("term_hessian: block must be 6x6");
  }
  auto at = [&](int r, int c) -> double& { return hess[static_cast<std::size_t>(r * kDecisionDim + c)]; };
  const double w = term.weight;
  const auto& s = d.state;
  switch (term.kind) {
    case CostTemplate::kLaneDeviation:
      at(1, 1) += 2.0 * w;
      return;
    case CostTemplate::kSpeedLimit:
      if (s.speed > term.target) at(3, 3) += 2.0 * w;
      return;
    case CostTemplate::kProgress:
      if (term.target > s.speed) at(3, 3) += 2.0 * w;
      return;
    case CostTemplate::kControlEffort:
      at(4, 4) += 2.0 * w;
      at(5, 5) += 2.0 * w;
      return;
    case CostTemplate::kPedestrianClearance: {
      if (ctx.road == nullptr) return;
      for (const auto& p : ctx.road->pedestrians) {
        const double dx = s.px - p.x;
        const double dy = s.py - p.y;
        const double dist = std::max(std::hypot(dx, dy), kDistanceFloor);
        const double e = hinge(ctx.radius + p.radius + term.target - dist);
        if (e <= 0.0) continue;
        // d2(e^2) = 2 u u^T - 2 e (I - u u^T) / dist, u the unit offset.
        const double ux = dx / dist;
        const double uy = dy / dist;
        const double k = e / dist;
        at(0, 0) += 2.0 * w * (ux * ux - k * (1.0 - ux * ux));
        at(1, 1) += 2.0 * w * (uy * uy - k * (1.0 - uy * uy));
        const double off = 2.0 * w * (ux * uy + k * ux * uy);
        at(0, 1) += off;
        at(1, 0) += off;
      }
      return;
    }
    case CostTemplate::kRoadBoundary: {
      if (ctx.road == nullptr) return;
      if (s.py + ctx.radius > ctx.road->y_max) at(1, 1) += 2.0 * w;
      if (ctx.road->y_min - s.py + ctx.radius > 0.0) at(1, 1) += 2.0 * w;
      return;
    }
  }
}

void level_cost_hessian(const PreferenceLevel& level, const Trajectory& window,
                        const CostContext& ctx, std::span<double> blocks) {
  constexpr std::size_t kBlock = kDecisionDim * kDecisionDim;
  if (blocks.size() != window.size() * kBlock) {
    throw std::invalid_argument("level_cost_hessian: block storage size mismatch");
  }
  std::fill(blocks.begin(), blocks.end(), 0.0);
  for (std::size_t t = 0; t < window.size(); ++t) {
    auto h = blocks.subspan(t * kBlock, kBlock);
    for (const auto& term : level.terms) term_hessian(term, window[t], ctx, h);
  }
}

void pedestrian_row_hessian(const Decision& d, const Pedestrian& p, std::span<double, 3> out) {
  const double dx = d.state.px - p.x;
  const double dy = d.state.py - p.y;
  const double dist = std::max(std::hypot(dx, dy), kDistanceFloor);
  const double ux = dx / dist;
  const double uy = dy / dist;
  out[0] = (1.0 - ux * ux) / dist;
  out[1] = -ux * uy / dist;
  out[2] = (1.0 - uy * uy) / dist;
}

}  // namespace lexibr
