#include "lexibr/lexicographic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <string>

namespace lexibr {

using nlp::Matrix;
using nlp::Vector;

namespace {

constexpr int D = kDecisionDim;

// l <= y + d is imposed as sqrt(2d) - sqrt(l - y + d) >= 0. Same feasible
// set, but l - y grows quadratically away from the level's optimal set, so
// its square root grows linearly and the row keeps an O(1) gradient at the
// bound; the raw row has a gradient of order sqrt(d) there, which drives the
// multipliers toward 1/sqrt(d). Below l = y - d/2 the row is clamped (value
// constant, slope zero); it is inactive there.
struct BoundRow {
  double optimum = 0.0;
  double slack = 0.0;

  double arg(double cost) const { return cost - optimum + slack; }
  bool clamped(double cost) const { return arg(cost) < 0.5 * slack; }
  double value(double cost) const {
    return std::sqrt(2.0 * slack) - std::sqrt(std::max(arg(cost), 0.5 * slack));
  }
  double slope(double cost) const { return clamped(cost) ? 0.0 : 0.5 / std::sqrt(arg(cost)); }
};

struct ProgramData {
  BestResponseProblem problem;
  ProgramLayout layout;
  const PreferenceLevel* objective = nullptr;  // null for the constraint-only program
  std::vector<const PreferenceLevel*> bound_levels;
  std::vector<BoundRow> bound_rows;

  CostContext context() const { return CostContext{&problem.road, problem.agent.radius}; }
};

ProgramLayout make_layout(const BestResponseProblem& p, int level_bounds) {
  const int T = p.horizon();
  ProgramLayout l;
  l.horizon = T;
  l.initial_rows = kStateDim;
  l.dynamics_rows = kStateDim * (T - 1);
  l.control_bound_rows = 4 * T;
  l.speed_rows = p.forward_only ? T - 1 : 0;
  l.road_rows = p.road.hard_boundary ? num_road_inequalities(p.road) * (T - 1) : 0;
  l.collision_rows = static_cast<int>(p.opponents.size()) * (T - 1);
  l.level_bound_rows = level_bounds;
  return l;
}

Vector equalities(const ProgramData& data, const Vector& z) {
  const auto& p = data.problem;
  const int T = data.layout.horizon;
  Vector c(data.layout.num_eq());
  const AgentState& m = p.measured_state;
  c[0] = z[0] - m.px;
  c[1] = z[1] - m.py;
  c[2] = wrap_angle(z[2] - m.heading);
  c[3] = z[3] - m.speed;
  const double dt = p.dt;
  for (int t = 0; t + 1 < T; ++t) {
    const double* a = z.data() + t * D;
    const double* b = a + D;
    const int r = kStateDim * (t + 1);
    c[r + 0] = b[0] - (a[0] + dt * a[3] * std::cos(a[2]));
    c[r + 1] = b[1] - (a[1] + dt * a[3] * std::sin(a[2]));
    c[r + 2] = wrap_angle(b[2] - (a[2] + dt * a[5]));
    c[r + 3] = b[3] - (a[3] + dt * a[4]);
  }
  return c;
}

Matrix equality_jacobian(const ProgramData& data, const Vector& z) {
  const int T = data.layout.horizon;
  Matrix J = Matrix::Zero(data.layout.num_eq(), z.size());
  for (int i = 0; i < kStateDim; ++i) J(i, i) = 1.0;
  const double dt = data.problem.dt;
  for (int t = 0; t + 1 < T; ++t) {
    const double* a = z.data() + t * D;
    const int r = kStateDim * (t + 1);
    const int ca = t * D;
    const int cb = ca + D;
    const double ch = std::cos(a[2]);
    const double sh = std::sin(a[2]);
    for (int i = 0; i < kStateDim; ++i) {
      J(r + i, cb + i) = 1.0;
      J(r + i, ca + i) = -1.0;
    }
    J(r + 0, ca + 2) = dt * a[3] * sh;
    J(r + 0, ca + 3) = -dt * ch;
    J(r + 1, ca + 2) = -dt * a[3] * ch;
    J(r + 1, ca + 3) = -dt * sh;
    J(r + 2, ca + 5) = -dt;
    J(r + 3, ca + 4) = -dt;
  }
  return J;
}

Vector inequalities(const ProgramData& data, const Vector& z) {
  const auto& p = data.problem;
  const auto& l = data.layout;
  const int T = l.horizon;
  Vector g(l.num_ineq());
  int row = 0;
  const auto& cb = p.agent.control_bounds;
  for (int t = 0; t < T; ++t) {
    const double* a = z.data() + t * D;
    g[row++] = a[4] - cb.lower.accel;
    g[row++] = cb.upper.accel - a[4];
    g[row++] = a[5] - cb.lower.yaw_rate;
    g[row++] = cb.upper.yaw_rate - a[5];
  }
  if (l.speed_rows > 0) {
    for (int t = 1; t < T; ++t) g[row++] = z[t * D + 3];
  }
  if (l.road_rows > 0) {
    for (int t = 1; t < T; ++t) {
      const Decision d = from_array(std::span<const double, D>(z.data() + t * D, D));
      for (double v : road_inequalities(d, p.road, p.agent.radius)) g[row++] = v;
    }
  }
  for (const auto& opp : p.opponents) {
    const double rsum = p.agent.radius + opp.radius;
    for (int t = 1; t < T; ++t) {
      const double dx = z[t * D] - opp.trajectory[t].state.px;
      const double dy = z[t * D + 1] - opp.trajectory[t].state.py;
      g[row++] = dx * dx + dy * dy - rsum * rsum;
    }
  }
  if (!data.bound_levels.empty()) {
    const Trajectory traj = unpack(z);
    const CostContext ctx = data.context();
    for (std::size_t j = 0; j < data.bound_levels.size(); ++j) {
      const double cost = evaluate_level_cost(*data.bound_levels[j], traj, ctx);
      g[row++] = data.bound_rows[j].value(cost);
    }
  }
  return g;
}

Matrix inequality_jacobian(const ProgramData& data, const Vector& z) {
  const auto& p = data.problem;
  const auto& l = data.layout;
  const int T = l.horizon;
  Matrix J = Matrix::Zero(l.num_ineq(), z.size());
  int row = 0;
  for (int t = 0; t < T; ++t) {
    J(row++, t * D + 4) = 1.0;
    J(row++, t * D + 4) = -1.0;
    J(row++, t * D + 5) = 1.0;
    J(row++, t * D + 5) = -1.0;
  }
  if (l.speed_rows > 0) {
    for (int t = 1; t < T; ++t) J(row++, t * D + 3) = 1.0;
  }
  if (l.road_rows > 0) {
    const int per_step = num_road_inequalities(p.road);
    std::vector<double> jac(2 * static_cast<std::size_t>(per_step));
    for (int t = 1; t < T; ++t) {
      const Decision d = from_array(std::span<const double, D>(z.data() + t * D, D));
      road_inequality_gradients(d, p.road, jac);
      for (int k = 0; k < per_step; ++k) {
        J(row, t * D) = jac[2 * k];
        J(row, t * D + 1) = jac[2 * k + 1];
        ++row;
      }
    }
  }
  for (const auto& opp : p.opponents) {
    for (int t = 1; t < T; ++t) {
      J(row, t * D) = 2.0 * (z[t * D] - opp.trajectory[t].state.px);
      J(row, t * D + 1) = 2.0 * (z[t * D + 1] - opp.trajectory[t].state.py);
      ++row;
    }
  }
  if (!data.bound_levels.empty()) {
    const Trajectory traj = unpack(z);
    const CostContext ctx = data.context();
    std::vector<double> grad(z.size());
    for (std::size_t j = 0; j < data.bound_levels.size(); ++j) {
      const double cost = evaluate_level_cost(*data.bound_levels[j], traj, ctx, grad);
      const double scale = data.bound_rows[j].slope(cost);
      for (Eigen::Index i = 0; i < z.size(); ++i) J(row, i) = -scale * grad[i];
      ++row;
    }
  }
  return J;
}

void add_block(Matrix& H, int t, std::span<const double> block, double scale = 1.0) {
  for (int r = 0; r < D; ++r) {
    for (int c = 0; c < D; ++c) H(t * D + r, t * D + c) += scale * block[r * D + c];
  }
}

// grad^2 f - sum w_eq grad^2 c - sum w_in grad^2 g, rows in the same order as
// equalities() and inequalities().
Matrix lagrangian_hessian(const ProgramData& data, const Vector& z, const Vector& w_eq,
                          const Vector& w_in) {
  const auto& p = data.problem;
  const auto& l = data.layout;
  const int T = l.horizon;
  const int n = static_cast<int>(z.size());
  Matrix H = Matrix::Zero(n, n);
  const Trajectory traj = unpack(z);
  const CostContext ctx = data.context();
  std::vector<double> blocks(static_cast<std::size_t>(D * D * T));
  if (data.objective != nullptr) {
    level_cost_hessian(*data.objective, traj, ctx, blocks);
    for (int t = 0; t < T; ++t) add_block(H, t, std::span<const double>(blocks).subspan(t * D * D, D * D));
  }
  const double dt = p.dt;
  for (int t = 0; t + 1 < T; ++t) {
    const double* a = z.data() + t * D;
    const int r = kStateDim * (t + 1);
    const double ch = std::cos(a[2]);
    const double sh = std::sin(a[2]);
    // Rows b - a - dt v (cos h, sin h); only the heading/speed block is curved.
    const double hh = w_eq[r] * dt * a[3] * ch + w_eq[r + 1] * dt * a[3] * sh;
    const double hv = w_eq[r] * dt * sh - w_eq[r + 1] * dt * ch;
    H(t * D + 2, t * D + 2) -= hh;
    H(t * D + 2, t * D + 3) -= hv;
    H(t * D + 3, t * D + 2) -= hv;
  }
  int row = l.control_bound_rows + l.speed_rows;
  if (l.road_rows > 0) {
    for (int t = 1; t < T; ++t) {
      row += 2;
      for (const auto& ped : p.road.pedestrians) {
        std::array<double, 3> h{};
        pedestrian_row_hessian(traj[static_cast<std::size_t>(t)], ped, h);
        const double w = w_in[row++];
        H(t * D, t * D) -= w * h[0];
        H(t * D, t * D + 1) -= w * h[1];
        H(t * D + 1, t * D) -= w * h[1];
        H(t * D + 1, t * D + 1) -= w * h[2];
      }
    }
  }
  for (std::size_t o = 0; o < p.opponents.size(); ++o) {
    for (int t = 1; t < T; ++t) {
      const double w = w_in[row++];
      H(t * D, t * D) -= 2.0 * w;
      H(t * D + 1, t * D + 1) -= 2.0 * w;
    }
  }
  std::vector<double> grad(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < data.bound_levels.size(); ++j) {
    const double w = w_in[row++];
    if (w == 0.0) continue;
    const double cost = evaluate_level_cost(*data.bound_levels[j], traj, ctx, grad);
    level_cost_hessian(*data.bound_levels[j], traj, ctx, blocks);
    if (data.bound_rows[j].clamped(cost)) continue;
    // Row sqrt(2d) - q with q = sqrt(l - y + d):
    // -grad^2 row = grad^2 l / (2q) - grad l grad l^T / (4 q^3).
    const double q = std::sqrt(data.bound_rows[j].arg(cost));
    for (int t = 0; t < T; ++t) {
      add_block(H, t, std::span<const double>(blocks).subspan(t * D * D, D * D), w / (2.0 * q));
    }
    const Eigen::Map<const Vector> gv(grad.data(), n);
    H.noalias() -= (w / (4.0 * q * q * q)) * gv * gv.transpose();
  }
  return H;
}

LevelProgram make_program(std::shared_ptr<ProgramData> data) {
  LevelProgram out;
  out.layout = data->layout;
  for (const auto& b : data->bound_rows) out.level_bound_rhs.push_back(b.optimum + b.slack);
  nlp::SmoothProgram& prog = out.program;
  prog.dim = kDecisionDim * data->layout.horizon;
  if (data->objective != nullptr) {
    prog.objective.value = [data](const Vector& z) {
      return evaluate_level_cost(*data->objective, unpack(z), data->context());
    };
    prog.objective.gradient = [data](const Vector& z) {
      Vector grad(z.size());
      evaluate_level_cost(*data->objective, unpack(z), data->context(),
                          std::span<double>(grad.data(), static_cast<std::size_t>(grad.size())));
      return grad;
    };
  } else {
    prog.objective.value = [](const Vector&) { return 0.0; };
    prog.objective.gradient = [](const Vector& z) { return Vector::Zero(z.size()).eval(); };
  }
  prog.eq.rows = data->layout.num_eq();
  prog.eq.value = [data](const Vector& z) { return equalities(*data, z); };
  prog.eq.jacobian = [data](const Vector& z) { return equality_jacobian(*data, z); };
  prog.ineq.rows = data->layout.num_ineq();
  prog.ineq.value = [data](const Vector& z) { return inequalities(*data, z); };
  prog.ineq.jacobian = [data](const Vector& z) { return inequality_jacobian(*data, z); };
  prog.hessian = [data](const Vector& z, const Vector& w_eq, const Vector& w_in) {
    return lagrangian_hessian(*data, z, w_eq, w_in);
  };
  return out;
}

}  // namespace

void BestResponseProblem::validate() const {
  const std::size_t T = warm_start.size();
  if (T == 0) throw std::invalid_argument("BestResponseProblem: empty warm start");
  if (!(dt > 0.0)) throw std::invalid_argument("BestResponseProblem: dt must be > 0");
  for (const auto& opp : opponents) {
    if (opp.trajectory.size() != T) {
      throw std::invalid_argument("BestResponseProblem: opponent trajectory length != T");
    }
  }
  if (agent.preferences.depth() < 1) {
    throw std::invalid_argument("BestResponseProblem: agent has no preference levels");
  }
}

double level_slack(double optimum) { return 1e-6 * (1.0 + std::abs(optimum)); }

Vector pack(const Trajectory& traj) {
  Vector z(static_cast<Eigen::Index>(traj.size()) * D);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const DecisionArray a = to_array(traj[t]);
    for (int i = 0; i < D; ++i) z[static_cast<Eigen::Index>(t) * D + i] = a[i];
  }
  return z;
}

Trajectory unpack(const Vector& z) {
  if (z.size() % D != 0) throw std::invalid_argument("unpack: size is not a multiple of 6");
  Trajectory traj(static_cast<std::size_t>(z.size() / D));
  for (std::size_t t = 0; t < traj.size(); ++t) {
    traj[t] = from_array(std::span<const double, D>(z.data() + t * D, D));
  }
  return traj;
}

LevelProgram build_level_program(const BestResponseProblem& problem, int k,
                                 const std::vector<double>& prior_optima) {
  problem.validate();
  const int K = problem.agent.preferences.depth();
  if (k < 1 || k > K) throw std::invalid_argument("build_level_program: level out of range");
  if (static_cast<int>(prior_optima.size()) != k - 1) {
    throw std::invalid_argument("build_level_program: need exactly k-1 prior optima");
  }
  auto data = std::make_shared<ProgramData>();
  data->problem = problem;
  data->layout = make_layout(problem, k - 1);
  const auto& levels = data->problem.agent.preferences.levels;
  data->objective = &levels[static_cast<std::size_t>(k - 1)];
  for (int j = 0; j + 1 < k; ++j) {
    data->bound_levels.push_back(&levels[static_cast<std::size_t>(j)]);
    const double y = prior_optima[static_cast<std::size_t>(j)];
    data->bound_rows.push_back(BoundRow{y, level_slack(y)});
  }
  return make_program(std::move(data));
}

LevelProgram build_constraint_program(const BestResponseProblem& problem) {
  problem.validate();
  auto data = std::make_shared<ProgramData>();
  data->problem = problem;
  data->layout = make_layout(problem, 0);
  return make_program(std::move(data));
}

LevelInfeasibleError::LevelInfeasibleError(int level, double residual)
    : std::runtime_error("lexicographic level " + std::to_string(level) +
                         " infeasible (residual " + std::to_string(residual) + ")"),
      level_(level) {}

int LexiSolution::total_inner_iterations() const {
  int total = 0;
  for (const auto& l : levels) total += l.inner_iterations;
  return total;
}

LexiSolution solve_lexicographic(const BestResponseProblem& problem,
                                 const nlp::SolverOptions& options) {
  problem.validate();
  const int K = problem.agent.preferences.depth();
  LexiSolution out;
  Vector z = pack(problem.warm_start);
  for (int k = 1; k <= K; ++k) {
    const LevelProgram level = build_level_program(problem, k, out.level_optima);
    nlp::SolveResult r = nlp::minimize(level.program, z, options);
    if (r.status == nlp::SolveStatus::kInfeasible) {
      throw LevelInfeasibleError(k, r.kkt_residual);
    }
    z = r.point;
    out.level_optima.push_back(r.objective_value);
    LevelRecord rec;
    rec.status = r.status;
    rec.cost = r.objective_value;
    rec.kkt_residual = r.kkt_residual;
    rec.inner_iterations = r.inner_iterations;
    rec.outer_iterations = r.outer_iterations;
    rec.point = std::move(r.point);
    rec.multipliers = std::move(r.multipliers);
    out.levels.push_back(std::move(rec));
  }
  out.trajectory = unpack(z);
  return out;
}

std::vector<double> level_costs(const BestResponseProblem& problem, const Trajectory& traj) {
  const CostContext ctx{&problem.road, problem.agent.radius};
  std::vector<double> out;
  for (const auto& level : problem.agent.preferences.levels) {
    out.push_back(evaluate_level_cost(level, traj, ctx));
  }
  return out;
}

DominanceReport check_dominance(const BestResponseProblem& problem, const LexiSolution& solution,
                                const DominanceOptions& options) {
  problem.validate();
  const double dt = problem.dt;
  const std::vector<ControlInput> base = controls_of(solution.trajectory);
  const Trajectory reference = rollout(problem.measured_state, base, dt);
  const std::vector<double> ref_costs = level_costs(problem, reference);
  const LevelProgram hard = build_constraint_program(problem);
  const ControlBounds& box = problem.agent.control_bounds;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> noise(-options.control_halfwidth,
                                               options.control_halfwidth);
  DominanceReport report;
  for (int s = 0; s < options.samples; ++s) {
    std::vector<ControlInput> controls = base;
    for (auto& u : controls) {
      u.accel = std::clamp(u.accel + noise(rng), box.lower.accel, box.upper.accel);
      u.yaw_rate = std::clamp(u.yaw_rate + noise(rng), box.lower.yaw_rate, box.upper.yaw_rate);
    }
    ++report.samples;
    const Trajectory trial = rollout(problem.measured_state, controls, dt);
    const Vector g = hard.program.ineq.eval(pack(trial));
    if (g.size() > 0 && g.minCoeff() < -options.feasibility_tolerance) {
      ++report.infeasible;
      continue;
    }
    const std::vector<double> costs = level_costs(problem, trial);
    for (std::size_t j = 0; j < costs.size(); ++j) {
      if (costs[j] >= ref_costs[j] - options.tolerance) continue;
      bool guarded = false;
      for (std::size_t m = 0; m < j && !guarded; ++m) {
        const double y = solution.level_optima[m];
        guarded = costs[m] > y + level_slack(y) || costs[m] > ref_costs[m] + options.tolerance;
      }
      if (!guarded) {
        ++report.counterexamples;
        if (report.first_counterexample_level == 0) {
          report.first_counterexample_level = static_cast<int>(j) + 1;
        }
        break;
      }
    }
  }
  return report;
}

}  // namespace lexibr
