#include "paufsim/config.hpp"

#include <fstream>
#include <sstream>

namespace paufsim {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(Errc::ConfigInvalid, key + ": expected a boolean, got '" + v + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::uint64_t out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail(Errc::ConfigInvalid, key + ": expected a number, got '" + v + "'");
    }
}

} // namespace

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(Errc::ConfigInvalid, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(Errc::ConfigInvalid, "line " + std::to_string(lineno) + ": empty key");
        if (out.count(key))
            fail(Errc::ConfigInvalid, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

RansomwareFamily family_from_kv(const std::map<std::string, std::string>& kv) {
    RansomwareFamily f;
    for (const auto& [key, value] : kv) {
        if (key == "name") {
            f.name = value;
        } else if (key == "extensions") {
            std::istringstream in(value);
            std::string ext;
            while (in >> ext) f.extensions.insert(ext);
        } else if (key == "rename_suffix") {
            f.rename_suffix = value;
        } else if (key == "key_seed") {
            f.key_seed = parse_u64(key, value);
        } else if (key == "pace") {
            f.pace = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "targets_ads") {
            f.targets_ads = parse_bool(key, value);
        } else if (key == "tampers_proxy") {
            f.tampers_proxy = parse_bool(key, value);
        } else if (key == "seeks_admin") {
            f.seeks_admin = parse_bool(key, value);
        } else if (key == "via_proxy") {
            f.via_proxy = parse_bool(key, value);
        } else if (key == "replaces_linkers") {
            f.replaces_linkers = parse_bool(key, value);
        } else {
            fail(Errc::ConfigInvalid, "unknown family key '" + key + "'");
        }
    }
    if (f.name.empty()) fail(Errc::ConfigInvalid, "family needs a name");
    return f;
}

ScenarioConfig scenario_from_kv(const std::map<std::string, std::string>& kv) {
    ScenarioConfig cfg;
    std::map<std::string, std::string> family_keys;
    bool inline_family = false;
    bool builtin_ref = false;
    for (const auto& [key, value] : kv) {
        if (key == "id") {
            cfg.id = value;
        } else if (key == "monitor") {
            auto mode = parse_monitor_mode(value);
            if (!mode) fail(Errc::ConfigInvalid, "monitor: expected off|basic|advanced");
            cfg.mode = *mode;
        } else if (key == "family") {
            cfg.family = builtin_family(value);
            builtin_ref = true;
        } else if (key.rfind("family.", 0) == 0) {
            family_keys[key.substr(7)] = value;
            inline_family = true;
        } else if (key == "corpus.count") {
            cfg.corpus.count = parse_u64(key, value);
        } else if (key == "corpus.min_size") {
            cfg.corpus.min_size = parse_u64(key, value);
        } else if (key == "corpus.max_size") {
            cfg.corpus.max_size = parse_u64(key, value);
        } else if (key == "corpus.seed") {
            cfg.corpus.seed = parse_u64(key, value);
        } else {
            fail(Errc::ConfigInvalid, "unknown scenario key '" + key + "'");
        }
    }
    if (inline_family && builtin_ref)
        fail(Errc::ConfigInvalid, "give either family = <builtin> or family.* keys, not both");
    if (inline_family) cfg.family = family_from_kv(family_keys);
    if (cfg.family.name.empty()) fail(Errc::ConfigInvalid, "scenario needs a family");
    if (cfg.corpus.min_size > cfg.corpus.max_size)
        fail(Errc::ConfigInvalid, "corpus.min_size exceeds corpus.max_size");
    if (cfg.id.empty()) cfg.id = cfg.family.name + "-" + monitor_mode_name(cfg.mode);
    return cfg;
}

static std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ConfigInvalid, "cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

RansomwareFamily load_family_file(const std::string& path) {
    return family_from_kv(parse_kv(read_file(path)));
}

ScenarioConfig load_scenario_file(const std::string& path) {
    return scenario_from_kv(parse_kv(read_file(path)));
}

} // namespace paufsim
