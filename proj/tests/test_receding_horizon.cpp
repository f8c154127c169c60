#include "doctest.h"
#include "lexibr/receding_horizon.hpp"
#include "lexibr/scenarios.hpp"
#include "support.hpp"

using namespace lexibr;

namespace {

Scenario small_game(int Tg, int T, int Tl) {
  Scenario s = build_overtaking(2);
  s.config.game_horizon = Tg;
  s.config.window = T;
  s.config.turn_length = Tl;
  return s;
}

std::vector<AgentState> initial_states(const Scenario& s) {
  std::vector<AgentState> out;
  for (const auto& a : s.agents) out.push_back(a.initial_state);
  return out;
}

}  // namespace

TEST_CASE("stage_count is ceil(T_g / T_l)") {
  GameConfig c;
  c.game_horizon = 60;
  c.turn_length = 2;
  CHECK(stage_count(c) == 30);
  c.game_horizon = 7;
  c.window = 4;
  CHECK(stage_count(c) == 4);
  c.turn_length = 4;
  CHECK(stage_count(c) == 2);
}

TEST_CASE("advance: resting agents and single steps") {
  JointStrategy stage;
  stage.trajectories = {rollout({0, 0, 0, 0}, std::vector<ControlInput>(4), 0.1),
                        rollout({3, 1, 0.5, 0}, std::vector<ControlInput>(4), 0.1)};
  const std::vector<AgentState> rest{{0, 0, 0, 0}, {3, 1, 0.5, 0}};
  CHECK(advance(rest, stage, 2, 0.1) == rest);

  JointStrategy moving;
  const std::vector<ControlInput> u{{1.0, 0.3}, {0.5, -0.2}};
  const AgentState x0{1, 2, 0.1, 4};
  moving.trajectories = {rollout(x0, u, 0.1)};
  const std::vector<AgentState> one{x0};
  CHECK(advance(one, moving, 1, 0.1)[0] == step(x0, u[0], 0.1));
  CHECK(advance(one, moving, 2, 0.1)[0] == step(step(x0, u[0], 0.1), u[1], 0.1));
}

TEST_CASE("run_game: T_g = T = T_l is a single stage") {
  const Scenario s = small_game(6, 6, 6);
  const GameRun run = run_game(s);
  REQUIRE(run.complete);
  REQUIRE(run.stage_solutions.size() == 1);
  for (int i = 0; i < s.num_agents(); ++i) {
    CHECK(run.executed[static_cast<std::size_t>(i)] == run.stage_solutions[0].trajectories[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("run_game: splice, continuity and horizon accounting") {
  const Scenario s = small_game(6, 4, 2);
  const GameRun run = run_game(s);
  REQUIRE(run.complete);
  REQUIRE(run.stage_solutions.size() == 3);
  CHECK(run.stage_metrics.size() == 3);
  for (int i = 0; i < s.num_agents(); ++i) {
    const auto& exec = run.executed[static_cast<std::size_t>(i)];
    REQUIRE(exec.size() == 6);
    for (int m = 0; m < 3; ++m) {
      const auto& stage = run.stage_solutions[static_cast<std::size_t>(m)].trajectories[static_cast<std::size_t>(i)];
      for (int k = 0; k < 2; ++k) CHECK(exec[static_cast<std::size_t>(2 * m + k)] == stage[static_cast<std::size_t>(k)]);
    }
    // Next stage's measured state is the state reached by executing the prefix.
    for (int m = 0; m + 1 < 3; ++m) {
      const auto& stage = run.stage_solutions[static_cast<std::size_t>(m)].trajectories[static_cast<std::size_t>(i)];
      const auto& next = run.stage_solutions[static_cast<std::size_t>(m + 1)].trajectories[static_cast<std::size_t>(i)];
      CHECK(next[0].state == step(stage[1].state, stage[1].control, s.config.dt));
      CHECK(next[0].state == stage[2].state);
    }
  }
  const testing::RunCheck check = testing::check_run(run, s);
  CHECK(check.length_ok);
  CHECK(check.continuity_ok);
  CHECK(check.worst_collision >= -1e-4);
}

TEST_CASE("run_game: final stage is truncated when T_l does not divide T_g") {
  const Scenario s = small_game(7, 4, 2);
  const GameRun run = run_game(s);
  REQUIRE(run.complete);
  CHECK(run.stage_solutions.size() == 4);
  for (const auto& exec : run.executed) CHECK(exec.size() == 7);
  CHECK(testing::check_run(run, s).continuity_ok);
}

TEST_CASE("run_game: observer sees every stage") {
  const Scenario s = small_game(8, 4, 2);
  std::vector<int> times;
  RunOptions options;
  options.observer = [&](const StageContext& ctx) {
    times.push_back(ctx.time);
    CHECK(ctx.result != nullptr);
    CHECK(ctx.measured.size() == 3);
    CHECK((ctx.stage_index == 0) == !ctx.previous->has_value());
  };
  CHECK(run_game(s, options).complete);
  CHECK(times == std::vector<int>{0, 2, 4, 6});
}

TEST_CASE("run_game: disturbance hook moves the measured state") {
  const Scenario s = small_game(4, 4, 2);
  RunOptions options;
  options.disturbance = [](int, int, const AgentState& x) {
    AgentState y = x;
    y.py += 0.01;
    return y;
  };
  const GameRun run = run_game(s, options);
  REQUIRE(run.complete);
  const auto& first = run.stage_solutions[0].trajectories[0];
  const auto& second = run.stage_solutions[1].trajectories[0];
  CHECK(second[0].state.py == doctest::Approx(first[2].state.py + 0.01));
}

TEST_CASE("run_game: a failing stage returns the partial run") {
  Scenario s = small_game(6, 4, 2);
  s.agents[1].initial_state = s.agents[0].initial_state;
  s.agents[1].initial_state.px += 0.3;
  s.agents[2].initial_state = s.agents[0].initial_state;
  s.agents[2].initial_state.px -= 0.3;
  const GameRun run = run_game(s);
  CHECK_FALSE(run.complete);
  CHECK_FALSE(run.diagnostic.empty());
  CHECK(run.stage_solutions.empty());
}

TEST_CASE("run_game: rejects invalid scenarios") {
  Scenario s = small_game(6, 4, 2);
  s.config.turn_length = 5;
  CHECK_THROWS_AS(run_game(s), std::invalid_argument);
}
