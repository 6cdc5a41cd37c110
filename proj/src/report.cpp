#include "paufsim/report.hpp"

#include <nlohmann/json.hpp>

namespace paufsim {

using nlohmann::json;

json to_json(const RunManifest& m) {
    return json{
        {"command", m.command},
        {"config_paths", m.config_paths},
        {"corpus_seed", m.corpus_seed},
        {"output_path", m.output_path},
        {"tool_version", m.tool_version},
    };
}

json to_json(const AttackTrace& t) {
    return json{
        {"family", t.family},
        {"events_emitted", t.events_emitted},
        {"attempts_blocked", t.attempts_blocked},
        {"linkers_encrypted", t.linkers_encrypted},
        {"ads_modified", t.ads_modified},
        {"normal_files_encrypted", t.normal_files_encrypted},
        {"terminated", t.terminated},
        {"termination_tick", t.termination_tick},
        {"duration_ticks", t.duration_ticks},
    };
}

json to_json(const RestoreReport& r) {
    return json{
        {"scanned", r.scanned},
        {"linkers_replaced", r.linkers_replaced},
        {"recovered", r.recovered},
        {"unrecoverable", r.unrecoverable},
    };
}

json to_json(const ScenarioReport& r, const RunManifest& manifest) {
    return json{
        {"scenario", r.id},
        {"family", r.family},
        {"monitor_mode", monitor_mode_name(r.mode)},
        {"corpus",
         {{"count", r.corpus.count},
          {"min_size", r.corpus.min_size},
          {"max_size", r.corpus.max_size},
          {"seed", r.corpus.seed}}},
        {"trace", to_json(r.trace)},
        {"restore", to_json(r.restore)},
        {"verdict",
         {{"pauf_total", r.pauf_total},
          {"recovered_intact", r.recovered_intact},
          {"ads_divergent", r.ads_divergent},
          {"files_lost", r.files_lost},
          {"alerts_raised", r.alerts_raised}}},
        {"limitation_flag", r.limitation_flag},
        {"manifest", to_json(manifest)},
    };
}

std::string scenario_report_text(const ScenarioReport& r, const RunManifest& manifest) {
    return to_json(r, manifest).dump(2) + "\n";
}

} // namespace paufsim
