#include "lexibr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace lexibr {

std::optional<double> l1_next_iteration_distance(const StageContext& stage,
                                                 const Scenario& scenario,
                                                 const nlp::SolverOptions& options) {
  const JointStrategy& returned = stage.result->joint;
  const RoundResult extra = best_response_round(returned, stage.measured, scenario, options);
  if (extra.degraded) return std::nullopt;
  return improvement(returned, extra.joint);
}

double BenchmarkRecord::median_l1() const {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (r.ok) v.push_back(r.l1_next_iter);
  }
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Scenario benchmark_scenario(const BenchmarkGrid& grid, int K, int L, std::uint64_t seed) {
  Scenario s = build_overtaking(K);
  s.config.max_iterations = L;
  s.config.epsilon = grid.epsilon;
  if (grid.game_horizon) s.config.game_horizon = *grid.game_horizon;
  PerturbationSpec spec = grid.perturbation;
  spec.seed = seed;
  return perturb(s, spec);
}

RunSummary run_benchmark_once(const Scenario& scenario, std::uint64_t seed,
                              const nlp::SolverOptions& options) {
  RunSummary summary;
  summary.seed = seed;
  double l1_total = 0.0;
  int l1_count = 0;
  RunOptions run_options;
  run_options.solver = options;
  run_options.observer = [&](const StageContext& ctx) {
    if (auto d = l1_next_iteration_distance(ctx, scenario, options)) {
      l1_total += *d;
      ++l1_count;
    }
  };
  try {
    const GameRun run = run_game(scenario, run_options);
    if (!run.complete) {
      summary.error = run.diagnostic;
      return summary;
    }
    double t_total = 0.0;
    int converged = 0;
    for (const auto& m : run.stage_metrics) {
      t_total += m.solve_seconds;
      converged += m.converged ? 1 : 0;
    }
    summary.stages = static_cast<int>(run.stage_metrics.size());
    summary.t_solve_mean = t_total / std::max(1, summary.stages);
    summary.converged_fraction = static_cast<double>(converged) / std::max(1, summary.stages);
    summary.l1_next_iter = l1_count > 0 ? l1_total / l1_count : 0.0;
    summary.ok = l1_count > 0;
    if (!summary.ok) summary.error = "no stage produced a next-iteration distance";
  } catch (const std::exception& e) {
    summary.error = e.what();
  }
  return summary;
}

std::vector<BenchmarkRecord> run_benchmark(const BenchmarkGrid& grid,
                                           const nlp::SolverOptions& options) {
  if (grid.K_values.empty() || grid.L_values.empty() || grid.runs < 1) {
    throw std::invalid_argument("run_benchmark: empty grid");
  }
  struct Job {
    std::size_t record;
    int run;
  };
  std::vector<BenchmarkRecord> records;
  std::vector<Job> jobs;
  std::vector<int> Ks = grid.K_values;
  std::vector<int> Ls = grid.L_values;
  std::sort(Ks.begin(), Ks.end());
  std::sort(Ls.begin(), Ls.end());
  for (int K : Ks) {
    for (int L : Ls) {
      BenchmarkRecord rec;
      rec.seed = grid.seed;
      rec.K = K;
      rec.L = L;
      rec.runs.resize(static_cast<std::size_t>(grid.runs));
      records.push_back(std::move(rec));
      for (int r = 0; r < grid.runs; ++r) jobs.push_back({records.size() - 1, r});
    }
  }

  auto execute = [&](const Job& job) {
    auto& rec = records[job.record];
    const std::uint64_t seed = grid.seed + static_cast<std::uint64_t>(job.run);
    RunSummary summary;
    try {
      summary = run_benchmark_once(benchmark_scenario(grid, rec.K, rec.L, seed), seed, options);
    } catch (const std::exception& e) {
      summary.seed = seed;
      summary.error = e.what();
    }
    rec.runs[static_cast<std::size_t>(job.run)] = std::move(summary);
  };

  const int workers = std::max(1, grid.workers);
  if (workers == 1) {
    for (const auto& job : jobs) execute(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) execute(jobs[j]);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (auto& rec : records) {
    int ok = 0;
    for (const auto& r : rec.runs) {
      if (!r.ok) {
        ++rec.failed_runs;
        continue;
      }
      ++ok;
      rec.t_solve_mean += r.t_solve_mean;
      rec.l1_next_iter += r.l1_next_iter;
      rec.stages += r.stages;
      rec.converged_fraction += r.converged_fraction;
    }
    if (ok > 0) {
      rec.t_solve_mean /= ok;
      rec.l1_next_iter /= ok;
      rec.converged_fraction /= ok;
    }
  }
  return records;
}

std::string benchmark_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out =
      "scenario,seed,K,L,t_solve_mean,l1_next_iter,l1_median,stages,converged_fraction,failed_runs\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%s,%llu,%d,%d,%.17g,%.17g,%.17g,%d,%.17g,%d\n",
                  r.scenario_id.c_str(), static_cast<unsigned long long>(r.seed), r.K, r.L,
                  r.t_solve_mean, r.l1_next_iter, r.median_l1(), r.stages, r.converged_fraction,
                  r.failed_runs);
    out += buf;
  }
  return out;
}

}  // namespace lexibr
