// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lexibr/bench.hpp"
#include "lexibr/oracle.hpp"
#include "lexibr/receding_horizon.hpp"
#include "lexibr/scenarios.hpp"
#include "support.hpp"

using namespace lexibr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Every executed run is collected for the safety and assembly criterion.
struct RunLog {
  std::vector<std::pair<std::string, testing::RunCheck>> checks;
  void add(const std::string& name, const GameRun& run, const Scenario& s) {
    checks.emplace_back(name, testing::check_run(run, s));
  }
};

double max_position_gap(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t t = 0; t < std::min(a.size(), b.size()); ++t) {
    worst = std::max(worst, std::hypot(a[t].state.px - b[t].state.px, a[t].state.py - b[t].state.py));
  }
  return worst;
}

double min_pedestrian_margin(const Trajectory& traj, const Road& road, double radius) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& d : traj) {
    for (const auto& p : road.pedestrians) {
      const double dist = std::hypot(d.state.px - p.x, d.state.py - p.y);
      worst = std::min(worst, dist - radius - p.radius);
    }
  }
  return worst;
}

// Cars are every agent except the ambulance, which is the last agent of the
// built-in scenarios.
int car_count(const Scenario& s) { return s.num_agents() - 1; }

Outcome preference_swap(RunLog& log) {
  const Scenario highway = build_highway();
  const Scenario city = build_city();
  auto start = Clock::now();
  const GameRun hw = run_game(highway);
  const double t_hw = seconds_since(start);
  start = Clock::now();
  const GameRun ct = run_game(city);
  const double t_ct = seconds_since(start);
  log.add("highway", hw, highway);
  log.add("city", ct, city);
  if (!hw.complete || !ct.complete) return {false, "a run aborted: " + hw.diagnostic + ct.diagnostic};

  double gap = 0.0;
  bool left_lane = false;
  double ped = std::numeric_limits<double>::infinity();
  for (int i = 0; i < car_count(highway); ++i) {
    const auto& h = hw.executed[static_cast<std::size_t>(i)];
    gap = std::max(gap, max_position_gap(h, ct.executed[static_cast<std::size_t>(i)]));
    // The lane is the band of half the lane width around its centerline.
    const double y0 = highway.agents[static_cast<std::size_t>(i)].initial_state.py;
    const double center =
        highway.road.lane_centers[static_cast<std::size_t>(highway.road.lane_of(y0))];
    for (const auto& d : h) {
      left_lane = left_lane || std::abs(d.state.py - center) > 0.5 * highway.road.lane_width;
    }
    ped = std::min(ped, min_pedestrian_margin(ct.executed[static_cast<std::size_t>(i)], city.road,
                                              city.agents[static_cast<std::size_t>(i)].radius));
  }
  std::ostringstream os;
  os << "max car gap " << gap << " m, city pedestrian margin " << ped
     << " m, highway car leaves lane " << (left_lane ? "yes" : "no") << ", runtimes " << t_hw
     << " s / " << t_ct << " s";
  return {gap > 0.5 && ped >= -1e-4 && left_lane && t_hw < 60.0 && t_ct < 60.0, os.str()};
}

const BenchmarkRecord* find_record(const std::vector<BenchmarkRecord>& records, int K, int L) {
  for (const auto& r : records) {
    if (r.K == K && r.L == L) return &r;
  }
  return nullptr;
}

Outcome convergence_trend(const std::vector<BenchmarkRecord>& records) {
  bool pass = true;
  std::ostringstream os;
  for (int K : {2, 3}) {
    const auto* l1 = find_record(records, K, 1);
    const auto* l5 = find_record(records, K, 5);
    if (!l1 || !l5) return {false, "missing benchmark cell"};
    const double a = l1->median_l1();
    const double b = l5->median_l1();
    pass = pass && b <= 0.1 * a && l1->failed_runs == 0 && l5->failed_runs == 0;
    os << "K=" << K << ": median l1 " << a << " (L=1) -> " << b << " (L=5), ratio " << b / a << "; ";
  }
  return {pass, os.str()};
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return syy == 0.0 ? 0.0 : sxy * sxy / (sxx * syy);
}

Outcome linear_cost(const std::vector<BenchmarkRecord>& records) {
  bool pass = true;
  std::ostringstream os;
  for (int K : {2, 3}) {
    std::vector<double> Ls, ts;
    for (int L : {1, 2, 3, 5}) {
      const auto* r = find_record(records, K, L);
      if (!r) return {false, "missing benchmark cell"};
      Ls.push_back(L);
      ts.push_back(r->t_solve_mean);
    }
    const double r2 = r_squared(Ls, ts);
    pass = pass && r2 >= 0.9;
    os << "K=" << K << ": R^2 " << r2 << " (t_solve";
    for (double t : ts) os << " " << t;
    os << " s); ";
  }
  return {pass, os.str()};
}

Scenario overtaking_run(int K, int L, std::uint64_t seed, double epsilon) {
  BenchmarkGrid grid;
  grid.epsilon = epsilon;
  return benchmark_scenario(grid, K, L, seed);
}

Outcome gne_certificate(RunLog& log) {
  int certified_stages = 0, failures = 0;
  double worst = 0.0;
  for (int K : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Scenario s = overtaking_run(K, 5, seed, 1e-3);
      RunOptions options;
      options.observer = [&](const StageContext& ctx) {
        if (!ctx.result->metrics.converged) return;
        ++certified_stages;
        const auto certs = certify_stage(s, ctx.result->joint, ctx.measured);
        bool ok = true;
        for (const auto& c : certs) {
          worst = std::max(worst, c.max_residual());
          ok = ok && c.max_residual() <= 1e-3;
        }
        failures += ok ? 0 : 1;
      };
      const GameRun run = run_game(s, options);
      log.add("certificate K=" + std::to_string(K) + " seed " + std::to_string(seed), run, s);
      if (!run.complete) ++failures;
    }
  }
  std::ostringstream os;
  os << certified_stages << " converged stages checked, " << failures
     << " with a level residual above 1e-3 (worst " << worst << ")";
  return {failures == 0 && certified_stages > 0, os.str()};
}

Outcome dominance(RunLog& log) {
  int checks = 0, counterexamples = 0, infeasible = 0, samples = 0;
  const std::vector<int> stages{0, 6, 12, 18, 24};
  for (int K : {2, 3}) {
    const Scenario s = overtaking_run(K, 1, 0, 1e-3);
    RunOptions options;
    options.observer = [&](const StageContext& ctx) {
      if (std::find(stages.begin(), stages.end(), ctx.stage_index) == stages.end()) return;
      for (int i = 0; i < s.num_agents(); ++i) {
        ++checks;
        const auto problem = make_best_response_problem(s, i, ctx.result->joint, ctx.measured);
        try {
          const LexiSolution sol = solve_lexicographic(problem);
          DominanceOptions opt;
          opt.seed = static_cast<std::uint64_t>(1000 * K + 10 * ctx.stage_index + i);
          const DominanceReport r = check_dominance(problem, sol, opt);
          samples += r.samples;
          infeasible += r.infeasible;
          counterexamples += r.counterexamples;
        } catch (const std::exception&) {
          ++counterexamples;
        }
      }
    };
    const GameRun run = run_game(s, options);
    log.add("dominance K=" + std::to_string(K), run, s);
  }
  std::ostringstream os;
  os << checks << " agent-stages x 100 perturbations (" << samples << " samples, " << infeasible
     << " infeasible), " << counterexamples << " counterexamples";
  return {counterexamples == 0 && checks == 2 * 5 * 3, os.str()};
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    try {
      passed += compare_with_oracle(make_tiny_instance(seed), 3).pass ? 1 : 0;
    } catch (const std::exception&) {
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << passed << "/10 instances tie or beat the grid oracle in " << elapsed << " s";
  return {passed == 10 && elapsed < 300.0, os.str()};
}

Outcome warm_start(RunLog& log) {
  int stages = 0, no_worse = 0;
  long warm_total = 0, cold_total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario s = overtaking_run(2, 1, seed, 1e-3);
    RunOptions options;
    options.observer = [&](const StageContext& ctx) {
      const int warm = ctx.result->metrics.total_inner_iterations();
      const StageResult cold = ibr_solve(std::nullopt, ctx.measured, s, {}, ctx.time);
      const int cold_iters = cold.metrics.total_inner_iterations();
      ++stages;
      no_worse += warm <= cold_iters ? 1 : 0;
      warm_total += warm;
      cold_total += cold_iters;
    };
    const GameRun run = run_game(s, options);
    log.add("warm start seed " + std::to_string(seed), run, s);
  }
  const double fraction = stages == 0 ? 0.0 : static_cast<double>(no_worse) / stages;
  std::ostringstream os;
  os << no_worse << "/" << stages << " stages (" << 100.0 * fraction
     << "%) need no more inner iterations warm than cold; totals " << warm_total << " vs "
     << cold_total;
  return {fraction >= 0.8, os.str()};
}

Outcome safety(const RunLog& log) {
  bool pass = !log.checks.empty();
  double worst = std::numeric_limits<double>::infinity();
  std::string broken;
  for (const auto& [name, c] : log.checks) {
    worst = std::min(worst, c.worst_collision);
    const bool ok = c.length_ok && c.continuity_ok && c.worst_collision >= -1e-4;
    if (!ok && broken.empty()) broken = name;
    pass = pass && ok;
  }
  std::ostringstream os;
  os << log.checks.size() << " executed runs, worst collision margin " << worst;
  if (!broken.empty()) os << ", first failing run: " << broken;
  return {pass, os.str()};
}

Outcome gradient_audit() {
  const auto items = testing::gradient_audit(100, 7);
  bool pass = true;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& item : items) {
    pass = pass && item.points == 100 && item.worst <= 1e-5;
    if (item.worst >= worst) {
      worst = item.worst;
      worst_name = item.name;
    }
  }
  std::ostringstream os;
  os << items.size() << " derivative families x 100 points, worst relative error " << worst << " ("
     << worst_name << ")";
  return {pass, os.str()};
}

}  // namespace

int main() {
  RunLog log;
  std::map<int, Outcome> outcomes;
  const std::map<int, std::string> names{
      {1, "preference swap highway vs city"},
      {2, "convergence trend in L"},
      {3, "linear solve time in L"},
      {4, "approximate GNE certificate"},
      {5, "lexicographic ordering"},
      {6, "oracle equivalence"},
      {7, "warm-start benefit"},
      {8, "safety and assembly"},
      {9, "gradient audit"},
  };
  const auto report = [&](int id, Outcome o) {
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, names.at(id).c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    outcomes[id] = std::move(o);
  };
  const auto guarded = [&](int id, const std::function<Outcome()>& f) {
    try {
      report(id, f());
    } catch (const std::exception& e) {
      report(id, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded(9, gradient_audit);
  guarded(1, [&] { return preference_swap(log); });
  std::vector<BenchmarkRecord> records;
  try {
    BenchmarkGrid grid;
    grid.L_values = {1, 2, 3, 5};
    grid.runs = 20;
    records = run_benchmark(grid);
  } catch (const std::exception& e) {
    std::printf("benchmark failed: %s\n", e.what());
  }
  guarded(2, [&] { return convergence_trend(records); });
  guarded(3, [&] { return linear_cost(records); });
  guarded(4, [&] { return gne_certificate(log); });
  guarded(5, [&] { return dominance(log); });
  guarded(6, oracle_equivalence);
  guarded(7, [&] { return warm_start(log); });
  guarded(8, [&] { return safety(log); });

  int failed = 0;
  for (const auto& [id, o] : outcomes) failed += o.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(outcomes.size()) - failed, outcomes.size());
  return failed == 0 ? 0 : 1;
}
