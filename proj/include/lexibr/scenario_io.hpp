#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lexibr/game_model.hpp"

namespace lexibr {

class ScenarioFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON scenario files. Top level: {name?, agents, road, config}; every object
// rejects keys it does not know.
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace lexibr
