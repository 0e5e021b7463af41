#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sbr/orchestrator.hpp"
#include "sbr/scenario.hpp"

namespace sbr {

/// Parse and fully validate a scenario document. Flows and periods may be
/// given per hour or per second, but the unit must be in the key name.
/// Throws ConfigError naming the offending field as a JSON pointer.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical document in SI keys; parse_scenario(scenario_to_text(s))
/// reproduces s exactly.
std::string scenario_to_text(const Scenario& scenario);

std::string outlets_csv(const RunResult& result);
std::string fields_csv(const RunResult& result);
std::string ledger_json(const RunResult& result, const Scenario& scenario);

/// Write the three output files into `dir` under the scenario's names.
void write_outputs(const RunResult& result, const Scenario& scenario, const std::filesystem::path& dir);

/// Scenario files compiled into the library: (file name, text).
const std::vector<std::pair<std::string, std::string>>& bundled_scenarios();

}  // namespace sbr
