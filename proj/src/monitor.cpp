#include "paufsim/monitor.hpp"

#include <algorithm>

namespace paufsim {

const char* mal_reason_name(MalReason r) {
    switch (r) {
    case MalReason::LinkerTamper: return "LinkerTamper";
    case MalReason::ProxyTamper: return "ProxyTamper";
    case MalReason::AdsTamperByNonProxy: return "AdsTamperByNonProxy";
    case MalReason::SystemFileTamper: return "SystemFileTamper";
    }
    return "Unknown";
}

Verdict classify_event(const IoEvent& ev, const std::string& pid_label, const PolicyContext& ctx) {
    Verdict v;
    v.event_seq = ev.seq;
    if (ev.read) return v;
    if (ctx.trusted_identities.count(pid_label)) return v;

    // ev.path covers writes and deletes; a rename landing on the proxy path
    // (after deleting the original) is the same tampering.
    if (!ctx.proxy_executable.empty() &&
        (ev.path == ctx.proxy_executable ||
         (ev.verb == Verb::Rename && ev.new_path == ctx.proxy_executable))) {
        v.malicious = true;
        v.reason = MalReason::ProxyTamper;
        return v;
    }
    if (ctx.system_files.count(ev.path)) {
        v.malicious = true;
        v.reason = MalReason::SystemFileTamper;
        return v;
    }
    if (ctx.protected_linkers.count(ev.path)) {
        bool tamper = ev.verb == Verb::WriteDefault || ev.verb == Verb::DeleteFile ||
                      ev.verb == Verb::Rename ||
                      (ev.verb == Verb::DeleteStream && ev.stream.empty());
        if (tamper) {
            v.malicious = true;
            v.reason = MalReason::LinkerTamper;
            return v;
        }
    }
    if (ctx.advanced && !ev.stream.empty() &&
        ctx.protected_ads.count({ev.path, ev.stream}) &&
        (ev.verb == Verb::WriteNamed || ev.verb == Verb::DeleteStream)) {
        v.malicious = true;
        v.reason = MalReason::AdsTamperByNonProxy;
        return v;
    }
    return v;
}

Monitor::Monitor(Volume& vol, MonitorConfig config) : vol_(vol), config_(std::move(config)) {
    if (vol_.monitor_installed()) fail(Errc::MonitorInstalled, "a monitor is already installed");
    if (config_.poll_interval_ms == 0) fail(Errc::ConfigInvalid, "poll interval must be positive");

    config_.trusted_identities.insert(config_.proxy_identity);
    ctx_.advanced = config_.advanced;
    ctx_.trusted_identities = config_.trusted_identities;
    ctx_.system_files = config_.system_files;
    ctx_.proxy_executable = config_.proxy_executable;
    if (!config_.proxy_executable.empty()) ctx_.system_files.insert(config_.proxy_executable);

    // The monitor subscribes from its install point onward.
    cursor_ = vol_.event_log().size();

    vol_.set_monitor_installed(true);
    vol_.set_poll_interval(config_.poll_interval_ms);
    vol_.set_trusted_labels(ctx_.trusted_identities);
    for (const std::string& p : ctx_.system_files) vol_.guard_path(p);
    installed_ = true;
}

Monitor::~Monitor() {
    if (installed_) {
        vol_.clear_guards();
        vol_.set_monitor_installed(false);
    }
}

void Monitor::uninstall(Pid pid) {
    const ProcessDescriptor& p = vol_.process(pid);
    if (!p.privileged)
        fail(Errc::UninstallDenied, p.label + " lacks administrator rights");
    installed_ = false;
    vol_.clear_guards();
    vol_.set_monitor_installed(false);
}

void Monitor::rekey_protected(const std::string& old_path, const std::string& new_path) {
    if (ctx_.protected_linkers.erase(old_path)) ctx_.protected_linkers.insert(new_path);
    std::vector<std::pair<std::string, std::string>> moved;
    for (auto it = ctx_.protected_ads.begin(); it != ctx_.protected_ads.end();) {
        if (it->first == old_path) {
            moved.emplace_back(new_path, it->second);
            it = ctx_.protected_ads.erase(it);
        } else {
            ++it;
        }
    }
    ctx_.protected_ads.insert(moved.begin(), moved.end());
}

std::vector<Alert> Monitor::poll(Tick now) {
    if (!installed_) return {};
    const auto& log = vol_.event_log();
    std::map<Pid, Alert> fresh;
    for (; cursor_ < log.size(); ++cursor_) {
        const IoEvent& ev = log[cursor_];
        Verdict v = classify(ev);
        // protected paths follow renames, even malicious ones
        if (ev.verb == Verb::Rename && !ev.denied) rekey_protected(ev.path, ev.new_path);
        if (!v.malicious) continue;
        auto [it, inserted] = fresh.try_emplace(ev.pid);
        if (inserted) {
            it->second.pid = ev.pid;
            it->second.tick_raised = now;
            if (vol_.process(ev.pid).state == ProcessState::Running)
                vol_.set_process_state(ev.pid, ProcessState::Suspended);
        }
        it->second.verdicts.push_back(v);
    }
    std::vector<Alert> out;
    out.reserve(fresh.size());
    for (auto& [pid, alert] : fresh) {
        decide(alert, now);
        alerts_.push_back(alert);
        out.push_back(alert);
    }
    return out;
}

void Monitor::decide(Alert& alert, Tick now) {
    bool terminate = true;
    switch (config_.alert_policy.kind) {
    case AlertPolicyKind::AlwaysTerminate: terminate = true; break;
    case AlertPolicyKind::AlwaysRelease: terminate = false; break;
    case AlertPolicyKind::Scripted:
        terminate = script_pos_ >= config_.alert_policy.script.size() ||
                    config_.alert_policy.script[script_pos_];
        ++script_pos_;
        break;
    }
    if (terminate) {
        vol_.set_process_state(alert.pid, ProcessState::Terminated);
        alert.decision = AlertDecision::Terminated;
    } else {
        vol_.set_process_state(alert.pid, ProcessState::Running);
        alert.decision = AlertDecision::Released;
    }
    alert.tick_decided = now;
}

Verdict Monitor::classify(const IoEvent& ev) const {
    return classify_event(ev, vol_.process(ev.pid).label, ctx_);
}

void Monitor::register_pauf(const std::string& linker_path, const std::string& ads_name) {
    ctx_.protected_linkers.insert(linker_path);
    ctx_.protected_ads.insert({linker_path, ads_name});
    if (ctx_.advanced && installed_) vol_.guard_stream(linker_path, ads_name);
}

void Monitor::deregister(const std::string& linker_path) {
    ctx_.protected_linkers.erase(linker_path);
    for (auto it = ctx_.protected_ads.begin(); it != ctx_.protected_ads.end();) {
        if (it->first == linker_path) {
            vol_.unguard_stream(it->first, it->second);
            it = ctx_.protected_ads.erase(it);
        } else {
            ++it;
        }
    }
}

} // namespace paufsim
