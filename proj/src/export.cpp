#include "lexibr/export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lexibr {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_run: cannot open " + path.string());
  out << body;
  out.close();
  if (!out) throw std::runtime_error("export_run: write failed for " + path.string());
}

}  // namespace

std::string trajectory_csv(const GameRun& run) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  const std::size_t T = run.executed.empty() ? 0 : run.executed.front().size();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < run.executed.size(); ++i) {
      const DecisionArray v = to_array(run.executed[i][t]);
      out += std::to_string(t);
      out += ',';
      out += std::to_string(i);
      for (double x : v) {
        out += ',';
        out += fmt17(x);
      }
      out += '\n';
    }
  }
  return out;
}

std::string metrics_csv(const GameRun& run) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (std::size_t s = 0; s < run.stage_metrics.size(); ++s) {
    const auto& m = run.stage_metrics[s];
    const double last = m.improvements.empty() ? 0.0 : m.improvements.back();
    out += std::to_string(s) + ',' + std::to_string(m.iterations_used) + ',' + fmt17(last) + ',' +
           fmt17(m.solve_seconds) + '\n';
  }
  return out;
}

void export_run(const GameRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "trajectory.csv", trajectory_csv(run));
  write_file(dir / "metrics.csv", metrics_csv(run));
}

std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw std::runtime_error("parse_trajectory_csv: bad header");
  }
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw std::runtime_error("parse_trajectory_csv: expected 8 columns");
    TrajectoryRow r;
    r.t = std::stoi(cells[0]);
    r.agent = std::stoi(cells[1]);
    DecisionArray v{};
    for (int k = 0; k < kDecisionDim; ++k) v[k] = std::stod(cells[2 + k]);
    r.decision = from_array(v);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace lexibr
