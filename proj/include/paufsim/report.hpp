#pragma once

#include "paufsim/attacksim.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace paufsim {

inline constexpr const char* kToolVersion = "0.1.0";

// Embedded in every report so a run can be reproduced from the report alone.
struct RunManifest {
    std::string command;
    std::vector<std::string> config_paths;
    std::uint64_t corpus_seed = 0;
    std::string output_path;
    std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& m);
nlohmann::json to_json(const AttackTrace& t);
nlohmann::json to_json(const RestoreReport& r);
nlohmann::json to_json(const ScenarioReport& r, const RunManifest& manifest);

std::string scenario_report_text(const ScenarioReport& r, const RunManifest& manifest);

} // namespace paufsim
