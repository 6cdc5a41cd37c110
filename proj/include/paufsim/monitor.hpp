#pragma once

#include "paufsim/vfs.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace paufsim {

enum class MalReason : std::uint8_t {
    LinkerTamper,
    ProxyTamper,
    AdsTamperByNonProxy,
    SystemFileTamper,
};

const char* mal_reason_name(MalReason r);

struct Verdict {
    std::uint64_t event_seq = 0;
    bool malicious = false;
    MalReason reason = MalReason::LinkerTamper; // meaningful only when malicious
};

enum class AlertDecision : std::uint8_t { Pending, Terminated, Released };

struct Alert {
    Pid pid = 0;
    std::vector<Verdict> verdicts; // the malicious events covered by this alert
    Tick tick_raised = 0;
    AlertDecision decision = AlertDecision::Pending;
    Tick tick_decided = 0;
};

enum class AlertPolicyKind : std::uint8_t { AlwaysTerminate, AlwaysRelease, Scripted };

struct AlertPolicy {
    AlertPolicyKind kind = AlertPolicyKind::AlwaysTerminate;
    std::vector<bool> script; // Scripted: true = terminate; exhausted entries terminate
};

// The protection policy's inputs, separated out so the classification rules
// are a pure function testable against a brute-force table.
struct PolicyContext {
    bool advanced = false; // ADS rule requires the proxy-based (advanced) mode
    std::set<std::string> trusted_identities;
    std::set<std::string> protected_linkers;                       // linker paths
    std::set<std::pair<std::string, std::string>> protected_ads;   // (path, stream)
    std::set<std::string> system_files;
    std::string proxy_executable;
};

// The protection policy. Reads are always benign; trusted identities
// (the proxy and the system's own tooling) are exempt. Untrusted mutations
// are malicious when they touch a linker's default stream, the proxy
// executable or a system file, or (advanced mode) a protected ADS stream.
Verdict classify_event(const IoEvent& ev, const std::string& pid_label, const PolicyContext& ctx);

struct MonitorConfig {
    Tick poll_interval_ms = 2000;
    bool advanced = false;
    std::string proxy_identity = "freedom-proxy";
    std::string proxy_executable;
    std::set<std::string> trusted_identities; // proxy_identity is added automatically
    std::set<std::string> system_files;
    AlertPolicy alert_policy;
};

// Polling driver monitor: every poll_interval_ms it classifies the I/O events
// logged since its last poll, suspends offending processes, raises alerts and
// applies the alert policy. Guards installed into the volume make protected
// ADS streams and system files reject untrusted writes inline; linker writes
// are only observed, so damage within one polling window is possible (and
// recoverable).
class Monitor {
public:
    Monitor(Volume& vol, MonitorConfig config);
    ~Monitor();

    Monitor(const Monitor&) = delete;
    Monitor& operator=(const Monitor&) = delete;

    bool installed() const { return installed_; }

    // Stops all classification and clears the guards. Only a privileged
    // process may do this; that is the documented limitation.
    void uninstall(Pid pid);

    // Classifies the events logged since the last poll. One alert per
    // offending process per poll; its verdicts cover every malicious event.
    std::vector<Alert> poll(Tick now);

    Verdict classify(const IoEvent& ev) const;

    void register_pauf(const std::string& linker_path, const std::string& ads_name);
    void deregister(const std::string& linker_path);

    const std::vector<Alert>& alerts() const { return alerts_; }
    const PolicyContext& policy() const { return ctx_; }
    const MonitorConfig& config() const { return config_; }

private:
    void decide(Alert& alert, Tick now);
    void rekey_protected(const std::string& old_path, const std::string& new_path);

    Volume& vol_;
    MonitorConfig config_;
    PolicyContext ctx_;
    std::vector<Alert> alerts_;
    std::uint64_t cursor_ = 0; // first unexamined event seq
    std::size_t script_pos_ = 0;
    bool installed_ = false;
};

} // namespace paufsim
