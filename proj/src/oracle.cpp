#include "lexibr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lexibr {

namespace {

struct Candidate {
  std::vector<int> index;  // grid index per control entry, accel/yaw interleaved
  Trajectory trajectory;
  std::vector<double> costs;
  bool privately_feasible = true;
};

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = 1e-12 * (1.0 + std::max(std::abs(a[k]), std::abs(b[k])));
    if (a[k] < b[k] - scale) return true;
    if (a[k] > b[k] + scale) return false;
  }
  return false;
}

bool lex_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return !lex_less(a, b) && !lex_less(b, a);
}

std::vector<double> grid_values(double lo, double hi, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n - 1));
  return v;
}

std::vector<ControlInput> decode(const std::vector<int>& idx, const std::vector<double>& acc,
                                 const std::vector<double>& yaw) {
  std::vector<ControlInput> u;
  for (std::size_t t = 0; 2 * t < idx.size(); ++t) {
    u.push_back(ControlInput{acc[static_cast<std::size_t>(idx[2 * t])],
                             yaw[static_cast<std::size_t>(idx[2 * t + 1])]});
  }
  return u;
}

bool private_feasible(const Trajectory& traj, const Scenario& s, const AgentSpec& a) {
  for (std::size_t t = 1; t < traj.size(); ++t) {
    if (s.config.forward_only && traj[t].state.speed < 0.0) return false;
    if (s.road.hard_boundary) {
      for (double v : road_inequalities(traj[t], s.road, a.radius)) {
        if (v < 0.0) return false;
      }
    }
  }
  return true;
}

bool jointly_feasible(const Trajectory& a, double ra, const Trajectory& b, double rb) {
  for (std::size_t t = 1; t < a.size(); ++t) {
    if (collision_margin(a[t], b[t], ra + rb) < 0.0) return false;
  }
  return true;
}

std::vector<Candidate> enumerate(const Scenario& s, const AgentSpec& a, int resolution) {
  const int T = s.config.window;
  const auto acc = grid_values(a.control_bounds.lower.accel, a.control_bounds.upper.accel, resolution);
  const auto yaw = grid_values(a.control_bounds.lower.yaw_rate, a.control_bounds.upper.yaw_rate, resolution);
  const CostContext ctx{&s.road, a.radius};
  const int entries = 2 * T;
  std::vector<int> idx(static_cast<std::size_t>(entries), 0);
  std::vector<Candidate> out;
  while (true) {
    Candidate c;
    c.index = idx;
    c.trajectory = rollout(a.initial_state, decode(idx, acc, yaw), s.config.dt);
    for (const auto& level : a.preferences.levels) {
      c.costs.push_back(evaluate_level_cost(level, c.trajectory, ctx));
    }
    c.privately_feasible = private_feasible(c.trajectory, s, a);
    out.push_back(std::move(c));
    int pos = 0;
    while (pos < entries && ++idx[static_cast<std::size_t>(pos)] == resolution) {
      idx[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == entries) break;
  }
  return out;
}

std::vector<double> cell_tolerance(const Candidate& c, const Scenario& s, const AgentSpec& a,
                                   int resolution) {
  const auto acc = grid_values(a.control_bounds.lower.accel, a.control_bounds.upper.accel, resolution);
  const auto yaw = grid_values(a.control_bounds.lower.yaw_rate, a.control_bounds.upper.yaw_rate, resolution);
  const CostContext ctx{&s.road, a.radius};
  std::vector<double> tol(c.costs.size(), 0.0);
  for (std::size_t e = 0; e < c.index.size(); ++e) {
    for (int delta : {-1, 1}) {
      std::vector<int> idx = c.index;
      idx[e] += delta;
      if (idx[e] < 0 || idx[e] >= resolution) continue;
      const Trajectory traj = rollout(a.initial_state, decode(idx, acc, yaw), s.config.dt);
      for (std::size_t k = 0; k < tol.size(); ++k) {
        tol[k] = std::max(tol[k], std::abs(evaluate_level_cost(a.preferences.levels[k], traj, ctx) -
                                           c.costs[k]));
      }
    }
  }
  return tol;
}

}  // namespace

bool ties_or_beats(const std::vector<double>& candidate, const std::vector<double>& reference,
                   const std::vector<double>& tolerance) {
  for (std::size_t k = 0; k < reference.size(); ++k) {
    if (candidate[k] < reference[k] - tolerance[k]) return true;
    if (candidate[k] > reference[k] + tolerance[k]) return false;
  }
  return true;
}

OracleResult brute_force_oracle(const Scenario& s, int resolution) {
  s.validate();
  const int N = s.num_agents();
  if (N > 2) throw std::invalid_argument("brute_force_oracle: at most 2 agents");
  if (s.config.window > 3) throw std::invalid_argument("brute_force_oracle: window must be <= 3");
  if (resolution < 1 || resolution > 5) {
    throw std::invalid_argument("brute_force_oracle: 1..5 grid values per control dimension");
  }
  std::vector<std::vector<Candidate>> cand;
  for (const auto& a : s.agents) cand.push_back(enumerate(s, a, resolution));

  OracleResult out;
  std::vector<std::size_t> best_pick;
  std::vector<double> best_key;

  auto consider = [&](const std::vector<std::size_t>& pick) {
    std::vector<double> key;
    for (int i = 0; i < N; ++i) {
      const auto& c = cand[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
      key.insert(key.end(), c.costs.begin(), c.costs.end());
    }
    ++out.equilibria;
    if (best_pick.empty() || lex_less(key, best_key)) {
      best_pick = pick;
      best_key = std::move(key);
    }
  };

  if (N == 1) {
    const auto& c0 = cand[0];
    std::size_t best = c0.size();
    for (std::size_t a = 0; a < c0.size(); ++a) {
      if (!c0[a].privately_feasible) continue;
      ++out.feasible_joints;
      if (best == c0.size() || lex_less(c0[a].costs, c0[best].costs)) best = a;
    }
    if (best == c0.size()) throw OracleError("brute_force_oracle: no feasible joint");
    for (std::size_t a = 0; a < c0.size(); ++a) {
      if (c0[a].privately_feasible && lex_equal(c0[a].costs, c0[best].costs)) consider({a});
    }
  } else {
    const auto& c0 = cand[0];
    const auto& c1 = cand[1];
    const double r0 = s.agents[0].radius;
    const double r1 = s.agents[1].radius;
    std::vector<std::vector<char>> feasible(c0.size(), std::vector<char>(c1.size(), 0));
    for (std::size_t a = 0; a < c0.size(); ++a) {
      if (!c0[a].privately_feasible) continue;
      for (std::size_t b = 0; b < c1.size(); ++b) {
        if (!c1[b].privately_feasible) continue;
        if (jointly_feasible(c0[a].trajectory, r0, c1[b].trajectory, r1)) {
          feasible[a][b] = 1;
          ++out.feasible_joints;
        }
      }
    }
    if (out.feasible_joints == 0) throw OracleError("brute_force_oracle: no feasible joint");
    // best0[b]: agent 0's best cost vector against b; best1[a] likewise.
    std::vector<std::optional<std::size_t>> best0(c1.size()), best1(c0.size());
    for (std::size_t b = 0; b < c1.size(); ++b) {
      for (std::size_t a = 0; a < c0.size(); ++a) {
        if (feasible[a][b] && (!best0[b] || lex_less(c0[a].costs, c0[*best0[b]].costs))) best0[b] = a;
      }
    }
    for (std::size_t a = 0; a < c0.size(); ++a) {
      for (std::size_t b = 0; b < c1.size(); ++b) {
        if (feasible[a][b] && (!best1[a] || lex_less(c1[b].costs, c1[*best1[a]].costs))) best1[a] = b;
      }
    }
    for (std::size_t a = 0; a < c0.size(); ++a) {
      for (std::size_t b = 0; b < c1.size(); ++b) {
        if (!feasible[a][b]) continue;
        if (lex_equal(c0[a].costs, c0[*best0[b]].costs) && lex_equal(c1[b].costs, c1[*best1[a]].costs)) {
          consider({a, b});
        }
      }
    }
  }
  if (best_pick.empty()) throw OracleError("brute_force_oracle: no pure grid equilibrium");

  out.joint.stage_time = 0;
  for (int i = 0; i < N; ++i) {
    const auto& c = cand[static_cast<std::size_t>(i)][best_pick[static_cast<std::size_t>(i)]];
    out.joint.trajectories.push_back(c.trajectory);
    out.level_costs.push_back(c.costs);
    out.cell_tolerance.push_back(cell_tolerance(c, s, s.agents[static_cast<std::size_t>(i)], resolution));
  }
  return out;
}

Scenario make_tiny_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  Scenario s;
  s.name = "tiny";
  s.config.game_horizon = 2;
  s.config.window = 2;
  s.config.turn_length = 2;
  s.config.max_iterations = 10;
  s.config.epsilon = 1e-6;
  s.road = Road{};
  for (int i = 0; i < 2; ++i) {
    AgentSpec a;
    a.id = i;
    a.radius = 1.0;
    const double lane = i == 0 ? -2.0 : 2.0;
    const double speed = uniform(3.0, 8.0);
    a.initial_state = i == 0 ? AgentState{0.0, lane + uniform(-0.5, 0.5), uniform(-0.2, 0.2), speed}
                             : AgentState{uniform(4.0, 10.0), lane + uniform(-0.5, 0.5),
                                          wrap_angle(std::numbers::pi + uniform(-0.2, 0.2)), speed};
    const double a_max = uniform(1.0, 3.0);
    const double w_max = uniform(0.2, 0.6);
    a.control_bounds.lower = ControlInput{-a_max, -w_max};
    a.control_bounds.upper = ControlInput{a_max, w_max};
    const double limit = speed + uniform(-0.3, 0.1);
    a.preferences.levels = {
        PreferenceLevel{{CostTerm{CostTemplate::kSpeedLimit, 1.0, limit}}},
        PreferenceLevel{{CostTerm{CostTemplate::kProgress, 1.0, speed + uniform(-0.5, 0.5)},
                         CostTerm{CostTemplate::kControlEffort, uniform(0.05, 0.5), 0.0}}},
    };
    s.agents.push_back(std::move(a));
  }
  return s;
}

OracleComparison compare_with_oracle(const Scenario& s, int resolution,
                                     const nlp::SolverOptions& options) {
  OracleComparison out;
  out.oracle = brute_force_oracle(s, resolution);
  std::vector<AgentState> measured;
  for (const auto& a : s.agents) measured.push_back(a.initial_state);
  const StageResult stage = ibr_solve(std::nullopt, measured, s, options);
  out.pass = true;
  for (int i = 0; i < s.num_agents(); ++i) {
    const auto& a = s.agents[static_cast<std::size_t>(i)];
    const CostContext ctx{&s.road, a.radius};
    std::vector<double> costs;
    for (const auto& level : a.preferences.levels) {
      costs.push_back(evaluate_level_cost(level, stage.joint.trajectories[static_cast<std::size_t>(i)], ctx));
    }
    out.pass = out.pass && ties_or_beats(costs, out.oracle.level_costs[static_cast<std::size_t>(i)],
                                         out.oracle.cell_tolerance[static_cast<std::size_t>(i)]);
    out.ibr_costs.push_back(std::move(costs));
  }
  return out;
}

}  // namespace lexibr
