// lexibr command-line entry points: simulate, bench, oracle-check,
// export-scenario. Exit codes: 0 success, 1 solver failure, 2 invalid
// arguments. LEXIBR_LOG=error|warn|info|debug sets stderr verbosity.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexibr/bench.hpp"
#include "lexibr/export.hpp"
#include "lexibr/oracle.hpp"
#include "lexibr/receding_horizon.hpp"
#include "lexibr/scenario_io.hpp"
#include "lexibr/scenarios.hpp"

namespace {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

Level log_level() {
  const char* env = std::getenv("LEXIBR_LOG");
  if (env == nullptr) return Level::kInfo;
  const std::string v(env);
  if (v == "error") return Level::kError;
  if (v == "warn") return Level::kWarn;
  if (v == "debug") return Level::kDebug;
  return Level::kInfo;
}

void log(Level level, const std::string& msg) {
  static const Level threshold = log_level();
  if (level > threshold) return;
  static const char* tags[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << tags[static_cast<int>(level)] << "] " << msg << "\n";
}

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

lexibr::Scenario resolve_scenario(const std::string& name, std::optional<int> K) {
  using namespace lexibr;
  if (name == "overtaking") return build_overtaking(K.value_or(2));
  if (name == "highway" || name == "city") {
    Scenario s = name == "highway" ? build_highway() : build_city();
    for (const auto& a : s.agents) {
      if (K && a.preferences.depth() != *K) {
        throw UsageError(name + " declares " + std::to_string(a.preferences.depth()) +
                         " preference levels; --K " + std::to_string(*K) + " does not match");
      }
    }
    return s;
  }
  if (name.rfind("file:", 0) == 0) {
    try {
      return load_scenario(name.substr(5));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("unknown scenario '" + name + "'");
}

int simulate(const std::string& scenario_name, std::optional<int> K, std::optional<int> L,
             std::optional<int> game_horizon, const std::string& out_dir) {
  lexibr::Scenario s = resolve_scenario(scenario_name, K);
  if (L) s.config.max_iterations = *L;
  if (game_horizon) s.config.game_horizon = *game_horizon;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  log(Level::kInfo, "simulating " + s.name + " (N=" + std::to_string(s.num_agents()) +
                        ", T_g=" + std::to_string(s.config.game_horizon) +
                        ", L=" + std::to_string(s.config.max_iterations) + ")");
  lexibr::RunOptions options;
  options.observer = [](const lexibr::StageContext& ctx) {
    const auto& m = ctx.result->metrics;
    std::ostringstream os;
    os << "stage " << ctx.stage_index << " t=" << ctx.time << " rounds=" << m.iterations_used
       << " improvement=" << (m.improvements.empty() ? 0.0 : m.improvements.back())
       << " t_solve=" << m.solve_seconds << "s";
    log(Level::kDebug, os.str());
  };
  const lexibr::GameRun run = lexibr::run_game(s, options);
  lexibr::export_run(run, out_dir);
  if (!run.complete) {
    log(Level::kError, "run aborted: " + run.diagnostic);
    return kExitSolver;
  }
  log(Level::kInfo, "wrote " + (std::filesystem::path(out_dir) / "trajectory.csv").string());
  return kExitOk;
}

int bench(const std::vector<int>& Ks, const std::vector<int>& Ls, int runs, std::uint64_t seed,
          int workers, std::optional<int> game_horizon, const std::string& out_dir) {
  lexibr::BenchmarkGrid grid;
  grid.K_values = Ks;
  grid.L_values = Ls;
  grid.runs = runs;
  grid.seed = seed;
  grid.workers = workers;
  grid.game_horizon = game_horizon;
  for (int K : Ks) {
    if (K != 2 && K != 3) throw UsageError("--K values must be 2 or 3");
  }
  for (int L : Ls) {
    if (L < 1) throw UsageError("--L values must be >= 1");
  }
  if (runs < 1) throw UsageError("--runs must be >= 1");
  if (workers > 1) log(Level::kWarn, "t_solve is contention-skewed with more than one worker");
  const auto records = lexibr::run_benchmark(grid);
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "benchmark.csv";
  std::ofstream out(path);
  out << lexibr::benchmark_csv(records);
  if (!out) {
    log(Level::kError, "cannot write " + path.string());
    return kExitSolver;
  }
  int failed = 0;
  for (const auto& r : records) {
    failed += r.failed_runs;
    std::ostringstream os;
    os << "K=" << r.K << " L=" << r.L << " t_solve=" << r.t_solve_mean
       << "s l1_next_iter=" << r.l1_next_iter << " failed=" << r.failed_runs;
    log(Level::kInfo, os.str());
  }
  log(Level::kInfo, "wrote " + path.string());
  return failed == 0 ? kExitOk : kExitSolver;
}

int oracle_check(int runs, std::uint64_t seed, int resolution) {
  int passed = 0;
  for (int r = 0; r < runs; ++r) {
    const auto s = lexibr::make_tiny_instance(seed + static_cast<std::uint64_t>(r));
    try {
      const auto cmp = lexibr::compare_with_oracle(s, resolution);
      passed += cmp.pass ? 1 : 0;
      std::cout << "instance " << r << ": " << (cmp.pass ? "PASS" : "FAIL") << "\n";
    } catch (const std::exception& e) {
      std::cout << "instance " << r << ": FAIL (" << e.what() << ")\n";
    }
  }
  std::cout << passed << "/" << runs << " instances tie or beat the grid oracle\n";
  return passed == runs ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon lexicographic iterated best response"};
  app.require_subcommand(1);

  std::string scenario_name;
  std::optional<int> K, L, game_horizon;
  std::string out_dir = "out";
  auto* sim = app.add_subcommand("simulate", "Run one game and export CSV");
  sim->add_option("--scenario", scenario_name, "highway | city | overtaking | file:<path>")->required();
  sim->add_option("--K", K, "Preference depth (overtaking: 2 or 3)");
  sim->add_option("--L", L, "Maximum IBR rounds per stage");
  sim->add_option("--T_g", game_horizon, "Override the game horizon");
  sim->add_option("--out", out_dir, "Output directory");

  std::vector<int> Ks{2, 3};
  std::vector<int> Ls{1, 2, 3, 5, 10, 20};
  int runs = 20;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<int> bench_horizon;
  std::string bench_out = "bench";
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo benchmark on the overtaking scenario");
  bench_cmd->add_option("--K", Ks, "Comma-separated preference depths")->delimiter(',');
  bench_cmd->add_option("--L", Ls, "Comma-separated round limits")->delimiter(',');
  bench_cmd->add_option("--runs", runs, "Perturbed runs per cell");
  bench_cmd->add_option("--seed", seed, "Base seed");
  bench_cmd->add_option("--workers", workers, "Concurrent runs");
  bench_cmd->add_option("--T_g", bench_horizon, "Override the game horizon");
  bench_cmd->add_option("--out", bench_out, "Output directory");

  int oracle_runs = 10;
  std::uint64_t oracle_seed = 0;
  int resolution = 3;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare IBR against the grid oracle");
  oracle_cmd->add_option("--runs", oracle_runs, "Random tiny instances");
  oracle_cmd->add_option("--seed", oracle_seed, "Base seed");
  oracle_cmd->add_option("--resolution", resolution, "Grid values per control dimension");

  std::string export_name;
  std::string export_path;
  auto* export_cmd = app.add_subcommand("export-scenario", "Write a built-in scenario as JSON");
  export_cmd->add_option("--scenario", export_name, "highway | city | overtaking")->required();
  export_cmd->add_option("--K", K, "Preference depth for overtaking");
  export_cmd->add_option("--out", export_path, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return simulate(scenario_name, K, L, game_horizon, out_dir);
    if (*bench_cmd) return bench(Ks, Ls, runs, seed, workers, bench_horizon, bench_out);
    if (*oracle_cmd) {
      if (resolution < 1 || resolution > 5) throw UsageError("--resolution must be in 1..5");
      return oracle_check(oracle_runs, oracle_seed, resolution);
    }
    if (*export_cmd) {
      lexibr::save_scenario(resolve_scenario(export_name, K), export_path);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    log(Level::kError, e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    log(Level::kError, e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log(Level::kError, e.what());
    return kExitSolver;
  }
  return kExitUsage;
}
