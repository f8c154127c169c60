#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "lexibr/ibr.hpp"
#include "lexibr/scenarios.hpp"

using namespace lexibr;

namespace {

Trajectory with_controls(std::vector<ControlInput> u) {
  return rollout({0, 0, 0, 5}, u, 0.1);
}

const ControlInput A{1, 0.1}, B{2, 0.2}, C{3, 0.3}, Dc{-1, -0.4};

AgentSpec cruiser(int id, AgentState x0, double target_speed, double lane) {
  AgentSpec a;
  a.id = id;
  a.initial_state = x0;
  a.preferences.levels = {
      PreferenceLevel{{{CostTemplate::kProgress, 1.0, target_speed}}},
      PreferenceLevel{{{CostTemplate::kLaneDeviation, 0.5, lane}, {CostTemplate::kControlEffort, 0.1, 0.0}}},
  };
  return a;
}

// Two agents far enough apart that no collision row is ever active.
Scenario separable(int L = 5) {
  Scenario s;
  s.name = "separable";
  s.agents = {cruiser(0, {0, -2, 0, 5}, 7.0, -1.5), cruiser(1, {200, 2, 0, 6}, 8.0, 2.5)};
  s.config.game_horizon = 10;
  s.config.window = 8;
  s.config.turn_length = 2;
  s.config.max_iterations = L;
  return s;
}

std::vector<AgentState> initial_states(const Scenario& s) {
  std::vector<AgentState> out;
  for (const auto& a : s.agents) out.push_back(a.initial_state);
  return out;
}

}  // namespace

TEST_CASE("shift_and_pad: worked examples") {
  const Trajectory four = with_controls({A, B, C, Dc});
  CHECK(shift_and_pad(four, 4, PaddingPolicy::kNullAction) == std::vector<ControlInput>(4));
  CHECK(shift_and_pad(four, 1, PaddingPolicy::kNullAction) ==
        std::vector<ControlInput>{B, C, Dc, ControlInput{}});
  CHECK(shift_and_pad(four, 2, PaddingPolicy::kRepeatLast) == std::vector<ControlInput>{C, Dc, Dc, Dc});
  CHECK_THROWS_AS(shift_and_pad(four, 0, PaddingPolicy::kNullAction), std::invalid_argument);
  CHECK_THROWS_AS(shift_and_pad(four, 5, PaddingPolicy::kNullAction), std::invalid_argument);
  for (int tl = 1; tl <= 4; ++tl) {
    for (auto policy : {PaddingPolicy::kNullAction, PaddingPolicy::kRepeatLast}) {
      const auto u = shift_and_pad(four, tl, policy);
      CHECK(u.size() == 4);
      const Trajectory t = rollout({1, 1, 0, 3}, u, 0.1);
      for (std::size_t k = 0; k + 1 < t.size(); ++k) CHECK(step(t[k].state, t[k].control, 0.1) == t[k + 1].state);
    }
  }
}

TEST_CASE("predict_initial: no previous stage and a resting agent") {
  Scenario s = separable();
  s.agents.resize(1);
  s.agents[0].initial_state.speed = 0.0;
  const JointStrategy j = predict_initial(std::nullopt, initial_states(s), s);
  REQUIRE(j.num_agents() == 1);
  CHECK(j.horizon() == s.config.window);
  for (const auto& d : j.trajectories[0]) CHECK(d.state == s.agents[0].initial_state);
}

TEST_CASE("predict_initial: exact previous stage gives its shifted tail") {
  Scenario s = separable();
  std::vector<ControlInput> u;
  for (int t = 0; t < s.config.window; ++t) u.push_back({0.1 * t, 0.01 * t});
  JointStrategy prev;
  for (const auto& a : s.agents) prev.trajectories.push_back(rollout(a.initial_state, u, s.config.dt));
  std::vector<AgentState> measured;
  for (const auto& traj : prev.trajectories) measured.push_back(traj[static_cast<std::size_t>(s.config.turn_length)].state);
  const JointStrategy pred = predict_initial(prev, measured, s, 2);
  CHECK(pred.stage_time == 2);
  for (int i = 0; i < 2; ++i) {
    const auto& p = pred.trajectories[static_cast<std::size_t>(i)];
    const auto& q = prev.trajectories[static_cast<std::size_t>(i)];
    const int T = s.config.window, Tl = s.config.turn_length;
    for (int t = 0; t + Tl < T; ++t) {
      CHECK(p[static_cast<std::size_t>(t)].state.px == doctest::Approx(q[static_cast<std::size_t>(t + Tl)].state.px));
      CHECK(p[static_cast<std::size_t>(t)].state.speed == doctest::Approx(q[static_cast<std::size_t>(t + Tl)].state.speed));
      CHECK(p[static_cast<std::size_t>(t)].control == q[static_cast<std::size_t>(t + Tl)].control);
    }
    CHECK(p.back().control == ControlInput{});
  }
}

TEST_CASE("predict_initial: T_l = T ignores previous controls") {
  Scenario s = separable();
  s.config.turn_length = s.config.window;
  JointStrategy prev;
  for (const auto& a : s.agents) {
    prev.trajectories.push_back(rollout(a.initial_state, std::vector<ControlInput>(8, C), s.config.dt));
  }
  const JointStrategy a = predict_initial(prev, initial_states(s), s);
  const JointStrategy b = predict_initial(std::nullopt, initial_states(s), s);
  CHECK(a.trajectories == b.trajectories);
}

TEST_CASE("improvement: examples") {
  JointStrategy a;
  a.trajectories = {rollout({0, 0, 0, 1}, std::vector<ControlInput>(10), 0.1),
                    rollout({5, 0, 0, 1}, std::vector<ControlInput>(10), 0.1)};
  CHECK(improvement(a, a) == 0.0);
  JointStrategy b = a;
  b.trajectories[1][3].control.accel += 0.5;
  // One of 120 variables moved by 0.5.
  CHECK(improvement(a, b) == doctest::Approx(0.5 / 120));
  JointStrategy c = a;
  c.trajectories[1][3].control.accel += 1.0;
  CHECK(improvement(a, c) == doctest::Approx(2 * improvement(a, b)));
  JointStrategy d = a;
  d.trajectories[0][2].state.heading = std::numbers::pi - 0.01;
  JointStrategy e = a;
  e.trajectories[0][2].state.heading = -std::numbers::pi + 0.01;
  CHECK(improvement(d, e) == doctest::Approx(0.02 / 120));
  JointStrategy short_one = a;
  short_one.trajectories.pop_back();
  CHECK_THROWS_AS(improvement(a, short_one), std::invalid_argument);
}

TEST_CASE("best_response_round: one agent is its best response") {
  Scenario s = separable();
  s.agents.resize(1);
  const auto measured = initial_states(s);
  const JointStrategy init = predict_initial(std::nullopt, measured, s);
  const RoundResult r = best_response_round(init, measured, s);
  const LexiSolution direct = solve_lexicographic(make_best_response_problem(s, 0, init, measured));
  CHECK_FALSE(r.degraded);
  REQUIRE(r.solutions[0].has_value());
  const Trajectory expect = rollout(measured[0], controls_of(direct.trajectory), s.config.dt);
  CHECK(r.joint.trajectories[0] == expect);
}

TEST_CASE("best_response_round: separable agents do not depend on order") {
  const Scenario s = separable();
  Scenario swapped = s;
  std::swap(swapped.agents[0], swapped.agents[1]);
  const auto m = initial_states(s), ms = initial_states(swapped);
  const RoundResult a = best_response_round(predict_initial(std::nullopt, m, s), m, s);
  const RoundResult b = best_response_round(predict_initial(std::nullopt, ms, swapped), ms, swapped);
  for (int i = 0; i < 2; ++i) {
    const auto& x = a.joint.trajectories[static_cast<std::size_t>(i)];
    const auto& y = b.joint.trajectories[static_cast<std::size_t>(1 - i)];
    double diff = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      const auto p = to_array(x[t]), q = to_array(y[t]);
      for (int k = 0; k < kDecisionDim; ++k) diff = std::max(diff, std::abs(p[static_cast<std::size_t>(k)] - q[static_cast<std::size_t>(k)]));
    }
    CHECK(diff <= 1e-6);
  }
  Scenario jacobi = s;
  jacobi.config.round_mode = RoundMode::kJacobi;
  const RoundResult c = best_response_round(predict_initial(std::nullopt, m, jacobi), m, jacobi);
  CHECK(improvement(a.joint, c.joint) <= 1e-9);
}

TEST_CASE("best_response_round: a fixed point stays put") {
  const Scenario s = build_overtaking(2);
  const auto m = initial_states(s);
  const RoundResult first = best_response_round(predict_initial(std::nullopt, m, s), m, s);
  RoundResult settled = best_response_round(first.joint, m, s);
  for (int k = 0; k < 4; ++k) settled = best_response_round(settled.joint, m, s);
  const RoundResult again = best_response_round(settled.joint, m, s);
  CHECK(improvement(settled.joint, again.joint) < 1e-4);
}

TEST_CASE("ibr_solve: L = 1 runs one round regardless of epsilon") {
  Scenario s = separable(1);
  s.config.epsilon = 1e-12;
  const StageResult r = ibr_solve(std::nullopt, initial_states(s), s);
  CHECK(r.metrics.iterations_used == 1);
  CHECK(r.metrics.improvements.size() == 1);
}

TEST_CASE("ibr_solve: infinite epsilon stops after the first round") {
  Scenario s = separable(5);
  s.config.epsilon = std::numeric_limits<double>::infinity();
  const StageResult r = ibr_solve(std::nullopt, initial_states(s), s);
  CHECK(r.metrics.iterations_used == 1);
  CHECK(r.metrics.converged);
}

TEST_CASE("ibr_solve: separable agents converge in round 2") {
  const Scenario s = separable(5);
  const StageResult r = ibr_solve(std::nullopt, initial_states(s), s);
  CHECK(r.metrics.iterations_used == 2);
  CHECK(r.metrics.converged);
  CHECK(r.metrics.improvements[1] < s.config.epsilon);
  for (double d : r.metrics.improvements) {
    CHECK(std::isfinite(d));
    CHECK(d >= 0.0);
  }
  CHECK(r.metrics.level_iterations.size() == 2);
  CHECK(r.metrics.total_inner_iterations() > 0);
}

TEST_CASE("ibr_solve: converged stages certify every level") {
  Scenario s = build_overtaking(3);
  s.config.max_iterations = 5;
  const auto m = initial_states(s);
  const StageResult r = ibr_solve(std::nullopt, m, s);
  CHECK(r.metrics.iterations_used <= 5);
  REQUIRE(r.metrics.converged);
  for (const auto& cert : certify_stage(s, r.joint, m)) {
    CHECK(cert.solved);
    CHECK(cert.level_residuals.size() == 3);
    CHECK(cert.max_residual() <= 1e-4);
    CHECK(cert.displacement < s.config.epsilon);
  }
}

TEST_CASE("ibr_solve: every agent infeasible is a stage error") {
  Scenario s = separable(1);
  // Both agents start overlapping, so step 1 cannot be collision-free.
  s.agents[1].initial_state = s.agents[0].initial_state;
  s.agents[1].initial_state.px += 0.5;
  CHECK_THROWS_AS(ibr_solve(std::nullopt, initial_states(s), s), StageError);
}
