#pragma once

#include "paufsim/attacksim.hpp"
#include "paufsim/common.hpp"

#include <map>
#include <string>

namespace paufsim {

// Minimal key = value config format: one pair per line, '#' comments,
// whitespace-insensitive. Used for family and scenario files.
std::map<std::string, std::string> parse_kv(const std::string& text);

// Family file keys: name, extensions (space-separated), rename_suffix,
// key_seed, pace, targets_ads, tampers_proxy, seeks_admin, via_proxy,
// replaces_linkers. Unknown keys are a config error.
RansomwareFamily family_from_kv(const std::map<std::string, std::string>& kv);

// Scenario file keys: id, monitor (off|basic|advanced), corpus.count,
// corpus.min_size, corpus.max_size, corpus.seed, plus either
// family = <builtin name> or inline family keys prefixed "family.".
ScenarioConfig scenario_from_kv(const std::map<std::string, std::string>& kv);

RansomwareFamily load_family_file(const std::string& path);
ScenarioConfig load_scenario_file(const std::string& path);

} // namespace paufsim
