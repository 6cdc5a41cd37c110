#pragma once

#include "paufsim/monitor.hpp"
#include "paufsim/pauf.hpp"
#include "paufsim/vfs.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace paufsim {

// Declarative attack behavior. Exactly one strategy is primary per run:
// via_proxy, targets_ads, tampers_proxy or replaces_linkers when set,
// otherwise the classic extension-list attack. seeks_admin additionally
// attempts a monitor uninstall before the primary strategy.
struct RansomwareFamily {
    std::string name;
    std::set<std::string> extensions; // dot included, e.g. ".txt"
    bool targets_ads = false;
    bool tampers_proxy = false;
    bool seeks_admin = false;
    bool via_proxy = false;
    bool replaces_linkers = false;
    std::string rename_suffix;
    std::uint64_t key_seed = 1;
    std::uint32_t pace = 10; // events per 100 simulated ms
};

// A family attacks linker files iff PowerShell scripts are on its list.
bool targets_linkers(const RansomwareFamily& f);

// Keyed stream cipher with a self-identifying header "ENCv1|<family>|".
// Invertible given (family name, key_seed, path), so tests can distinguish
// encrypted bytes from corrupted ones exactly.
Bytes encrypt_bytes(const RansomwareFamily& f, const std::string& path, const Bytes& plain);
std::optional<Bytes> decrypt_bytes(const RansomwareFamily& f, const std::string& path, const Bytes& cipher);
bool is_encrypted_by(const RansomwareFamily& f, const Bytes& data);

enum class MonitorMode { Off, BasicLinker, AdvancedWithProxy };

const char* monitor_mode_name(MonitorMode m);
std::optional<MonitorMode> parse_monitor_mode(const std::string& s);

// Outcome of one attack run; every count is computed from the volume's event
// log, never self-reported by the attack script.
struct AttackTrace {
    std::string family;
    std::uint64_t events_emitted = 0;
    std::uint64_t attempts_blocked = 0; // mutations rejected by access guards
    std::uint64_t linkers_encrypted = 0;
    std::uint64_t ads_modified = 0;
    std::uint64_t normal_files_encrypted = 0;
    bool terminated = false;
    Tick termination_tick = 0;
    Tick duration_ticks = 0;
    Tick start_tick = 0;
    std::uint64_t start_seq = 0;
};

// Runs one family against a prepared volume, interleaving clock advances at
// the family's pace and delivering monitor polls at every crossed deadline.
// Halts when the attacker's process is terminated or targets are exhausted.
AttackTrace run_attack(Volume& vol, Monitor* monitor, PaufWorkspace* workspace,
                       const RansomwareFamily& family);

struct CorpusSpec {
    std::uint64_t count = 40;
    std::uint64_t min_size = 256;
    std::uint64_t max_size = 8192;
    std::uint64_t seed = 7;
};

struct ScenarioConfig {
    std::string id;
    RansomwareFamily family;
    MonitorMode mode = MonitorMode::Off;
    CorpusSpec corpus;
};

struct ScenarioReport {
    std::string id;
    std::string family;
    MonitorMode mode = MonitorMode::Off;
    CorpusSpec corpus;
    AttackTrace trace;
    RestoreReport restore;
    std::uint64_t pauf_total = 0;
    std::uint64_t recovered_intact = 0; // byte-identical to the pre-attack snapshot
    std::uint64_t ads_divergent = 0;    // ADS bytes differ post-restore (via-proxy loss)
    std::uint64_t files_lost = 0;       // = restore.unrecoverable count
    std::uint64_t alerts_raised = 0;
    bool limitation_flag = false;
};

// Builds a fresh corpus, converts it, runs the attack, restores, and judges
// recovery against the pre-attack snapshot. Deterministic: identical configs
// yield identical reports.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Attack + restore + verdict on an existing prepared volume (used by the CLI
// on loaded images). The volume must already contain converted files.
ScenarioReport run_scenario_on(Volume& vol, const ScenarioConfig& cfg);

// Registers every PAUF already present in the volume with the monitor.
void register_existing_paufs(Volume& vol, Monitor& monitor);

// The 8 behavior-modeled existing families (only the WannaCry- and
// GandCrab-like ones target PowerShell files).
std::vector<RansomwareFamily> builtin_families();
RansomwareFamily builtin_family(const std::string& name);

// The 5 single-strategy families of the future-attack taxonomy.
std::vector<RansomwareFamily> future_families();

// 8 existing families x {Off, AdvancedWithProxy} plus the 5 future-attack
// scenarios: 21 configs.
std::vector<ScenarioConfig> builtin_suite();

// --- corpus preparation ---

inline constexpr const char* kSystemDir = "system/";
inline constexpr const char* kDocsDir = "docs/";
inline constexpr const char* kPlainDir = "plain/";
inline constexpr const char* kProxyExecutable = "system/freedom-proxy.exe";
inline constexpr const char* kDriverFile = "system/freedom-driver.sys";
inline constexpr const char* kAppFile = "system/freedom-app.exe";

// Seeded synthetic corpus: files of the common desk extensions under docs/
// (conversion candidates) and plain/ (left unconverted), plus the FREEDOM
// system files. Returns the "system" process id used for setup.
Pid build_synthetic_corpus(Volume& vol, const CorpusSpec& spec);

// Converts every eligible file under docs/ and returns how many.
std::size_t convert_all(Volume& vol, Pid pid, LinkerMode mode, Monitor* monitor = nullptr);

MonitorConfig default_monitor_config(MonitorMode mode);

} // namespace paufsim
