#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lexibr/receding_horizon.hpp"
#include "lexibr/scenarios.hpp"

namespace lexibr {

// One extra round on a stage's returned strategy; the distance between the
// two. Empty when that round could not solve every agent.
std::optional<double> l1_next_iteration_distance(const StageContext& stage,
                                                 const Scenario& scenario,
                                                 const nlp::SolverOptions& options = {});

struct BenchmarkGrid {
  std::vector<int> K_values{2, 3};
  std::vector<int> L_values{1, 2, 3, 5, 10, 20};
  int runs = 20;
  std::uint64_t seed = 0;  // run r uses seed + r in every cell
  PerturbationSpec perturbation;
  // Positive (as GameConfig requires) but below any nonzero improvement, so
  // a stage stops early only at an exact fixed point and t_solve tracks L.
  double epsilon = std::numeric_limits<double>::min();
  std::optional<int> game_horizon;
  int workers = 1;
};

struct RunSummary {
  std::uint64_t seed = 0;
  bool ok = false;
  double t_solve_mean = 0.0;
  double l1_next_iter = 0.0;  // mean over stages with a value
  int stages = 0;
  double converged_fraction = 0.0;
  std::string error;
};

struct BenchmarkRecord {
  std::string scenario_id = "overtaking";
  std::uint64_t seed = 0;
  int K = 0;
  int L = 0;
  double t_solve_mean = 0.0;
  double l1_next_iter = 0.0;
  int stages = 0;
  double converged_fraction = 0.0;
  int failed_runs = 0;
  std::vector<RunSummary> runs;

  double median_l1() const;
};

// Scenario used for one benchmark run (perturbed overtaking at depth K).
Scenario benchmark_scenario(const BenchmarkGrid& grid, int K, int L, std::uint64_t seed);

RunSummary run_benchmark_once(const Scenario& scenario, std::uint64_t seed,
                              const nlp::SolverOptions& options = {});

// Records sorted by (K, L). Per-run failures are recorded, never thrown.
std::vector<BenchmarkRecord> run_benchmark(const BenchmarkGrid& grid,
                                           const nlp::SolverOptions& options = {});

std::string benchmark_csv(const std::vector<BenchmarkRecord>& records);

}  // namespace lexibr
