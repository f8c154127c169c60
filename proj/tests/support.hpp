#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lexibr/game_model.hpp"
#include "lexibr/lexicographic.hpp"
#include "lexibr/nlp.hpp"
#include "lexibr/receding_horizon.hpp"

namespace lexibr::testing {

using nlp::Matrix;
using nlp::Vector;

// max |a - b| / max(1, max |b|): relative to the finite-difference scale,
// absolute near zero.
inline double relative_error(const Matrix& analytic, const Matrix& fd) {
  if (fd.size() == 0) return 0.0;
  const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

struct AuditItem {
  std::string name;
  int points = 0;
  double worst = 0.0;
};

inline Road audit_road() {
  Road road;
  road.pedestrians = {{6.0, 3.0, 1.0}, {-4.0, -3.5, 0.8}};
  road.hard_boundary = true;
  return road;
}

// Points spread over both sides of every hinge in the templates.
inline Decision random_decision(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> px(-10.0, 10.0), py(-6.0, 6.0), th(-3.0, 3.0),
      v(0.0, 15.0), a(-6.0, 3.0), w(-1.0, 1.0);
  return Decision{{px(rng), py(rng), th(rng), v(rng)}, {a(rng), w(rng)}};
}

inline CostTerm random_term(CostTemplate kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(0.1, 3.0), target(-3.0, 12.0);
  return CostTerm{kind, weight(rng), kind == CostTemplate::kPedestrianClearance
                                         ? std::uniform_real_distribution<double>(0.0, 2.0)(rng)
                                         : target(rng)};
}

// One random best-response problem whose level-3 program exercises every
// constraint family: control bounds, speed, hard road and pedestrian rows,
// collision against two opponents and two level bounds.
inline BestResponseProblem audit_problem(std::mt19937_64& rng, int T = 5) {
  BestResponseProblem p;
  p.road = audit_road();
  p.agent.radius = 1.0;
  p.agent.preferences.levels = {
      PreferenceLevel{{{CostTemplate::kSpeedLimit, 1.0, 9.0},
                       {CostTemplate::kPedestrianClearance, 1.0, 0.5}}},
      PreferenceLevel{{{CostTemplate::kProgress, 1.0, 8.0},
                       {CostTemplate::kRoadBoundary, 1.0, 0.0}}},
      PreferenceLevel{{{CostTemplate::kLaneDeviation, 0.5, 2.0},
                       {CostTemplate::kControlEffort, 0.1, 0.0}}},
  };
  p.measured_state = random_decision(rng).state;
  for (int t = 0; t < T; ++t) p.warm_start.push_back(random_decision(rng));
  p.warm_start[0].state = p.measured_state;
  for (int j = 0; j < 2; ++j) {
    Opponent opp;
    opp.radius = 0.8 + 0.4 * j;
    for (int t = 0; t < T; ++t) opp.trajectory.push_back(random_decision(rng));
    p.opponents.push_back(std::move(opp));
  }
  return p;
}

inline Vector random_point(std::mt19937_64& rng, int T) {
  Vector z(kDecisionDim * T);
  for (int t = 0; t < T; ++t) {
    const DecisionArray d = to_array(random_decision(rng));
    for (int k = 0; k < kDecisionDim; ++k) z[t * kDecisionDim + k] = d[static_cast<std::size_t>(k)];
  }
  return z;
}

// Analytic vs central-difference derivatives of every cost template, the
// collision and road rows, and a full level program (objective, dynamics and
// initial-state equalities, every inequality family, level bounds).
inline std::vector<AuditItem> gradient_audit(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AuditItem> items;
  const Road road = audit_road();
  const CostContext ctx{&road, 1.0};

  for (CostTemplate kind : kAllTemplates) {
    AuditItem item{"template " + std::string(template_name(kind))};
    for (int n = 0; n < points; ++n) {
      const CostTerm term = random_term(kind, rng);
      const Decision d = random_decision(rng);
      std::vector<double> grad(kDecisionDim, 0.0);
      term_value(term, d, ctx, grad);
      const auto f = [&](const Vector& x) {
        return term_value(term, from_array(std::span<const double, kDecisionDim>(x.data(), kDecisionDim)), ctx);
      };
      const DecisionArray a = to_array(d);
      const Vector x = Eigen::Map<const Vector>(a.data(), kDecisionDim);
      const Vector fd = nlp::gradient(f, x);
      item.worst = std::max(item.worst, relative_error(Eigen::Map<const Vector>(grad.data(), kDecisionDim), fd));
      ++item.points;
    }
    items.push_back(item);
  }

  {
    AuditItem item{"collision margin"};
    std::uniform_real_distribution<double> radius(0.5, 1.5);
    for (int n = 0; n < points; ++n) {
      const Decision own = random_decision(rng);
      const Decision other = random_decision(rng);
      const double rsum = radius(rng) + radius(rng);
      double gx = 0.0, gy = 0.0;
      collision_margin(own, other, rsum, &gx, &gy);
      const auto f = [&](const Vector& x) {
        Decision d = own;
        d.state.px = x[0];
        d.state.py = x[1];
        return collision_margin(d, other, rsum);
      };
      const Vector fd = nlp::gradient(f, Vector{{own.state.px, own.state.py}});
      item.worst = std::max(item.worst, relative_error(Vector{{gx, gy}}, fd));
      ++item.points;
    }
    items.push_back(item);
  }

  {
    AuditItem item{"road and pedestrian rows"};
    const int rows = num_road_inequalities(road);
    for (int n = 0; n < points; ++n) {
      const Decision d = random_decision(rng);
      std::vector<double> jac(2 * static_cast<std::size_t>(rows));
      road_inequality_gradients(d, road, jac);
      Matrix analytic(rows, 2);
      for (int r = 0; r < rows; ++r) {
        analytic(r, 0) = jac[2 * static_cast<std::size_t>(r)];
        analytic(r, 1) = jac[2 * static_cast<std::size_t>(r) + 1];
      }
      const auto f = [&](const Vector& x) {
        Decision e = d;
        e.state.px = x[0];
        e.state.py = x[1];
        const auto v = road_inequalities(e, road, 1.0);
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
      };
      const Matrix fd = nlp::jacobian(f, rows, Vector{{d.state.px, d.state.py}});
      item.worst = std::max(item.worst, relative_error(analytic, fd));
      ++item.points;
    }
    items.push_back(item);
  }

  {
    AuditItem objective{"level objective"};
    AuditItem eq{"dynamics and initial-state equalities"};
    AuditItem ineq{"inequalities incl. level bounds"};
    for (int n = 0; n < points; ++n) {
      const BestResponseProblem p = audit_problem(rng);
      // Zero prior optima keep the bound rows away from their clamp.
      const LevelProgram level = build_level_program(p, 3, {0.0, 0.0});
      const auto& prog = level.program;
      const Vector z = random_point(rng, p.horizon());
      objective.worst = std::max(
          objective.worst,
          relative_error(prog.objective.gradient(z), nlp::gradient(prog.objective.value, z)));
      eq.worst = std::max(eq.worst, relative_error(prog.eq.jacobian(z),
                                                   nlp::jacobian(prog.eq.value, prog.eq.rows, z)));
      ineq.worst = std::max(ineq.worst, relative_error(prog.ineq.jacobian(z),
                                                       nlp::jacobian(prog.ineq.value, prog.ineq.rows, z)));
      ++objective.points;
      ++eq.points;
      ++ineq.points;
    }
    items.push_back(objective);
    items.push_back(eq);
    items.push_back(ineq);
  }
  return items;
}

struct RunCheck {
  bool length_ok = true;
  bool continuity_ok = true;
  double worst_collision = 0.0;
};

// Executed length, exact state continuity and the worst pairwise collision
// margin over the executed run.
inline RunCheck check_run(const GameRun& run, const Scenario& scenario) {
  RunCheck out;
  out.worst_collision = std::numeric_limits<double>::infinity();
  std::vector<double> radii;
  for (const auto& a : scenario.agents) radii.push_back(a.radius);
  for (const auto& traj : run.executed) {
    if (static_cast<int>(traj.size()) != scenario.config.game_horizon) out.length_ok = false;
    for (std::size_t t = 0; t + 1 < traj.size(); ++t) {
      if (step(traj[t].state, traj[t].control, scenario.config.dt) != traj[t + 1].state) {
        out.continuity_ok = false;
      }
    }
  }
  if (!out.length_ok || run.executed.size() < 2) {
    if (run.executed.size() < 2) out.worst_collision = 0.0;
    return out;
  }
  for (int t = 0; t < scenario.config.game_horizon; ++t) {
    std::vector<Decision> joint;
    for (const auto& traj : run.executed) joint.push_back(traj[static_cast<std::size_t>(t)]);
    for (double g : collision_inequalities(joint, radii)) out.worst_collision = std::min(out.worst_collision, g);
  }
  return out;
}

}  // namespace lexibr::testing
