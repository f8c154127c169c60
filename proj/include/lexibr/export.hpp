#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lexibr/receding_horizon.hpp"

namespace lexibr {

inline constexpr std::string_view kTrajectoryHeader = "t,agent,px,py,heading,speed,accel,yaw_rate";
inline constexpr std::string_view kMetricsHeader = "stage,iterations,improvement_last,t_solve_s";

std::string trajectory_csv(const GameRun& run);
std::string metrics_csv(const GameRun& run);

// Writes <dir>/trajectory.csv and <dir>/metrics.csv, creating dir if needed.
// Numbers use 17 significant digits.
void export_run(const GameRun& run, const std::filesystem::path& dir);

struct TrajectoryRow {
  int t = 0;
  int agent = 0;
  Decision decision;
};

std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text);

}  // namespace lexibr
