#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lexibr/ibr.hpp"

namespace lexibr {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  JointStrategy joint;
  // [agent][level] costs of the returned joint.
  std::vector<std::vector<double>> level_costs;
  // [agent][level] largest cost change from moving one control entry of the
  // returned sequence by one grid cell.
  std::vector<std::vector<double>> cell_tolerance;
  int feasible_joints = 0;
  int equilibria = 0;
};

// Exhaustive grid equilibrium for tiny single-window games: N <= 2, T <= 3,
// `resolution` evenly spaced values (<= 5) per control dimension between each
// agent's bounds. Returns the pure equilibrium whose concatenated cost vector
// is lexicographically smallest.
OracleResult brute_force_oracle(const Scenario& scenario, int resolution);

// Lexicographic tie-or-beat of `candidate` against `reference`, level by level
// with per-level tolerances.
bool ties_or_beats(const std::vector<double>& candidate, const std::vector<double>& reference,
                   const std::vector<double>& tolerance);

// Random two-agent, T = 2, K = 2 single-stage instance.
Scenario make_tiny_instance(std::uint64_t seed);

struct OracleComparison {
  bool pass = false;
  std::vector<std::vector<double>> ibr_costs;
  OracleResult oracle;
};

// Solves `scenario` as one stage with IBR and compares against the oracle.
OracleComparison compare_with_oracle(const Scenario& scenario, int resolution,
                                     const nlp::SolverOptions& options = {});

}  // namespace lexibr
