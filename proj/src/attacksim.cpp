#include "paufsim/attacksim.hpp"

#include <algorithm>
#include <random>

namespace paufsim {

bool targets_linkers(const RansomwareFamily& f) { return f.extensions.count(".ps1") > 0; }

// --- keyed transform ---

static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

static std::string enc_header(const RansomwareFamily& f) { return "ENCv1|" + f.name + "|"; }

static void xor_keystream(std::uint64_t seed, Bytes& data) {
    std::uint64_t state = seed;
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (i % 8 == 0) word = splitmix64(state);
        data[i] ^= static_cast<std::uint8_t>(word >> ((i % 8) * 8));
    }
}

Bytes encrypt_bytes(const RansomwareFamily& f, const std::string& path, const Bytes& plain) {
    std::string hdr = enc_header(f);
    Bytes out(hdr.begin(), hdr.end());
    Bytes body = plain;
    xor_keystream(f.key_seed ^ fnv1a(path), body);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::optional<Bytes> decrypt_bytes(const RansomwareFamily& f, const std::string& path, const Bytes& cipher) {
    if (!is_encrypted_by(f, cipher)) return std::nullopt;
    std::string hdr = enc_header(f);
    Bytes body(cipher.begin() + hdr.size(), cipher.end());
    xor_keystream(f.key_seed ^ fnv1a(path), body);
    return body;
}

bool is_encrypted_by(const RansomwareFamily& f, const Bytes& data) {
    std::string hdr = enc_header(f);
    if (data.size() < hdr.size()) return false;
    return std::equal(hdr.begin(), hdr.end(), data.begin());
}

const char* monitor_mode_name(MonitorMode m) {
    switch (m) {
    case MonitorMode::Off: return "off";
    case MonitorMode::BasicLinker: return "basic";
    case MonitorMode::AdvancedWithProxy: return "advanced";
    }
    return "off";
}

std::optional<MonitorMode> parse_monitor_mode(const std::string& s) {
    if (s == "off") return MonitorMode::Off;
    if (s == "basic") return MonitorMode::BasicLinker;
    if (s == "advanced") return MonitorMode::AdvancedWithProxy;
    return std::nullopt;
}

// --- attack runner ---

namespace {

// Interleaves clock advances with attack operations and delivers monitor
// polls at every crossed deadline. A deadline equal to the operation's tick
// is delivered after the operation, so detection latency stays strictly
// below the poll interval.
class AttackStepper {
public:
    AttackStepper(Volume& vol, Monitor* monitor, Tick step, AttackTrace& trace)
        : vol_(vol), monitor_(monitor), step_(step), trace_(trace) {}

    bool alive() const { return alive_; }

    template <typename Fn>
    bool act(Fn&& fn, Tick extra_ms = 0) {
        if (!alive_) return false;
        auto due = vol_.advance_clock(step_ + extra_ms);
        std::size_t i = 0;
        for (; i < due.size() && due[i] < vol_.clock(); ++i) poll(due[i]);
        try {
            fn();
        } catch (const Error& e) {
            if (e.code() == Errc::ProcessNotRunning) {
                alive_ = false;
                trace_.terminated = true;
                trace_.termination_tick = vol_.clock();
            } else if (e.code() == Errc::AccessDenied) {
                // blocked by a guard; the attempt is on record
            } else {
                throw;
            }
        }
        for (; i < due.size(); ++i) poll(due[i]);
        return alive_;
    }

    // Delivers the next scheduled poll so trailing events get classified.
    void flush() {
        Tick interval = vol_.poll_interval();
        Tick rem = interval - vol_.clock() % interval;
        for (Tick t : vol_.advance_clock(rem)) poll(t);
    }

private:
    void poll(Tick t) {
        if (monitor_ && monitor_->installed()) monitor_->poll(t);
    }

    Volume& vol_;
    Monitor* monitor_;
    Tick step_;
    AttackTrace& trace_;
    bool alive_ = true;
};

bool under(const std::string& path, const char* prefix) { return path.rfind(prefix, 0) == 0; }

} // namespace

AttackTrace run_attack(Volume& vol, Monitor* monitor, PaufWorkspace* workspace,
                       const RansomwareFamily& family) {
    AttackTrace trace;
    trace.family = family.name;
    trace.start_seq = vol.event_log().size();
    trace.start_tick = vol.clock();

    Pid attacker = vol.register_process(family.name, family.seeks_admin);

    std::set<std::string> pauf_at_start;
    for (const auto& [path, e] : vol.entries())
        if (!find_protected_ads(vol, path).empty()) pauf_at_start.insert(path);

    Tick step = std::max<Tick>(1, 100 / std::max<std::uint32_t>(1, family.pace));
    AttackStepper stepper(vol, monitor, step, trace);

    if (family.seeks_admin && monitor && monitor->installed()) {
        stepper.act([&] {
            try {
                monitor->uninstall(attacker);
            } catch (const Error& e) {
                if (e.code() != Errc::UninstallDenied) throw;
            }
        });
    }

    if (family.via_proxy && workspace) {
        // remote-controlled normal usage: the open/save flow runs under the
        // proxy identity, exactly like a legitimate edit
        Pid driver_pid = attacker;
        for (const auto& [pid, p] : vol.processes())
            if (p.label == workspace->proxy_label() && p.state == ProcessState::Running) driver_pid = pid;
        for (const std::string& path : pauf_at_start) {
            if (!stepper.alive()) break;
            TempFileHandle handle;
            bool opened = false;
            stepper.act([&] {
                handle = workspace->open_pauf(vol, driver_pid, path);
                opened = true;
            });
            if (!opened) continue;
            // each file costs a full interactive open/edit/save round trip
            stepper.act(
                [&] {
                    Bytes plain = vol.peek_stream(path, handle.ads_name);
                    workspace->save_pauf(vol, driver_pid, handle, encrypt_bytes(family, path, plain));
                },
                400);
        }
    } else if (family.targets_ads) {
        for (const StreamInfo& info : vol.enumerate_streams()) {
            if (!stepper.alive()) break;
            if (!is_protected_ads_name(info.stream)) continue;
            Bytes plain;
            if (!stepper.act([&] { plain = vol.read_stream(attacker, info.path, info.stream); })) break;
            stepper.act([&] {
                vol.write_stream(attacker, info.path, info.stream,
                                 encrypt_bytes(family, info.path, plain));
            });
        }
    } else if (family.tampers_proxy) {
        std::vector<std::string> targets;
        for (const auto& [path, size] : vol.list_directory(kSystemDir)) targets.push_back(path);
        for (int round = 0; round < 3 && stepper.alive(); ++round) {
            for (const std::string& path : targets) {
                if (!stepper.alive()) break;
                stepper.act([&] {
                    vol.write_stream(attacker, path, "",
                                     encrypt_bytes(family, path, to_bytes("malicious payload")));
                });
            }
        }
    } else if (family.replaces_linkers) {
        Bytes rogue = to_bytes("powershell -c exfiltrate-and-encrypt");
        rogue.resize(kLinkerSize, 0);
        for (const std::string& path : pauf_at_start) {
            if (!stepper.alive()) break;
            stepper.act([&] { vol.write_stream(attacker, path, "", rogue); });
        }
    } else {
        // classic extension-list attack over the visible directory listing
        for (const auto& [path, size] : vol.list_directory()) {
            if (!stepper.alive()) break;
            if (under(path, kSystemDir)) continue;
            if (!family.extensions.count(path_extension(path))) continue;
            Bytes plain;
            if (!stepper.act([&] { plain = vol.read_stream(attacker, path, ""); })) break;
            if (!stepper.act([&] {
                    vol.write_stream(attacker, path, "", encrypt_bytes(family, path, plain));
                }))
                break;
            if (!family.rename_suffix.empty())
                stepper.act([&] { vol.rename(attacker, path, path + family.rename_suffix); });
        }
    }

    stepper.flush();
    // a fast attack can finish inside the first polling window; the monitor
    // still terminates the process at the window's end
    if (!trace.terminated && vol.process(attacker).state == ProcessState::Terminated) {
        trace.terminated = true;
        trace.termination_tick = vol.clock();
    }
    trace.duration_ticks = vol.clock() - trace.start_tick;

    // counts come from the event log, not from the script
    std::set<std::string> pauf = pauf_at_start;
    std::set<std::string> linkers_hit, normals_hit;
    std::set<std::pair<std::string, std::string>> ads_hit;
    const auto& log = vol.event_log();
    for (std::size_t i = trace.start_seq; i < log.size(); ++i) {
        const IoEvent& ev = log[i];
        if (ev.pid == attacker || ev.denied) ++trace.events_emitted;
        if (ev.denied) {
            ++trace.attempts_blocked;
            continue;
        }
        if (ev.read) continue;
        switch (ev.verb) {
        case Verb::WriteDefault:
            if (pauf.count(ev.path)) {
                if (ev.pid == attacker) linkers_hit.insert(ev.path);
            } else if (ev.pid == attacker && !under(ev.path, kSystemDir)) {
                normals_hit.insert(ev.path);
            }
            break;
        case Verb::WriteNamed:
        case Verb::DeleteStream:
            if (is_protected_ads_name(ev.stream)) ads_hit.insert({ev.path, ev.stream});
            break;
        case Verb::Rename:
            if (pauf.count(ev.path)) {
                pauf.erase(ev.path);
                pauf.insert(ev.new_path);
                if (linkers_hit.erase(ev.path)) linkers_hit.insert(ev.new_path);
            }
            break;
        default:
            break;
        }
    }
    trace.linkers_encrypted = linkers_hit.size();
    trace.ads_modified = ads_hit.size();
    trace.normal_files_encrypted = normals_hit.size();
    return trace;
}

// --- corpus ---

Pid build_synthetic_corpus(Volume& vol, const CorpusSpec& spec) {
    Pid sys = vol.register_process("system", true);
    vol.create_file(sys, kProxyExecutable, to_bytes("MZ freedom proxy application"));
    vol.create_file(sys, kDriverFile, to_bytes("freedom kernel driver"));
    vol.create_file(sys, kAppFile, to_bytes("MZ freedom system application"));

    static const char* kExts[] = {".txt", ".jpg", ".pdf", ".docx", ".xlsx", ".pptx"};
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::uint64_t> size_dist(spec.min_size, spec.max_size);
    for (std::uint64_t i = 0; i < spec.count; ++i) {
        const char* ext = kExts[i % std::size(kExts)];
        // every fifth file stays unconverted, mirroring opt-in protection
        const char* dir = (i % 5 == 4) ? kPlainDir : kDocsDir;
        char name[32];
        std::snprintf(name, sizeof name, "file%05llu", static_cast<unsigned long long>(i));
        Bytes data(size_dist(rng));
        for (auto& b : data) b = static_cast<std::uint8_t>(rng());
        vol.create_file(sys, std::string(dir) + name + ext, data);
    }
    return sys;
}

std::size_t convert_all(Volume& vol, Pid pid, LinkerMode mode, Monitor* monitor) {
    std::vector<std::string> candidates;
    for (const auto& [path, size] : vol.list_directory(kDocsDir))
        if (!is_pauf(vol, path)) candidates.push_back(path);
    for (const std::string& path : candidates) convert(vol, pid, path, mode, monitor);
    return candidates.size();
}

MonitorConfig default_monitor_config(MonitorMode mode) {
    MonitorConfig cfg;
    cfg.advanced = mode == MonitorMode::AdvancedWithProxy;
    cfg.proxy_executable = kProxyExecutable;
    cfg.system_files = {kDriverFile, kAppFile};
    cfg.trusted_identities = {"system"};
    return cfg;
}

void register_existing_paufs(Volume& vol, Monitor& monitor) {
    for (const auto& [path, e] : vol.entries()) {
        std::string ads = find_protected_ads(vol, path);
        if (!ads.empty()) monitor.register_pauf(path, ads);
    }
}

// --- scenarios ---

ScenarioReport run_scenario_on(Volume& vol, const ScenarioConfig& cfg) {
    LinkerMode lmode = cfg.mode == MonitorMode::AdvancedWithProxy ? LinkerMode::Advanced : LinkerMode::Basic;

    std::optional<Monitor> monitor;
    if (cfg.mode != MonitorMode::Off) {
        monitor.emplace(vol, default_monitor_config(cfg.mode));
        register_existing_paufs(vol, *monitor);
    }

    bool have_proxy = false;
    for (const auto& [pid, p] : vol.processes())
        if (p.label == "freedom-proxy" && p.state == ProcessState::Running) have_proxy = true;
    if (!have_proxy) vol.register_process("freedom-proxy");

    PaufWorkspace workspace;
    PaufSnapshot before = snapshot_paufs(vol);

    ScenarioReport report;
    report.id = cfg.id;
    report.family = cfg.family.name;
    report.mode = cfg.mode;
    report.corpus = cfg.corpus;
    report.pauf_total = before.size();
    report.limitation_flag = cfg.family.seeks_admin || cfg.family.via_proxy;

    report.trace = run_attack(vol, monitor ? &*monitor : nullptr, &workspace, cfg.family);

    RestoreOptions ropts;
    ropts.pid = [&] {
        for (const auto& [pid, p] : vol.processes())
            if (p.label == "system") return pid;
        return vol.register_process("system", true);
    }();
    ropts.mode = lmode;
    ropts.suffixes = default_rename_suffixes();
    ropts.trusted_labels = {"system", "freedom-proxy"};
    report.restore = restore_volume(vol, ropts, monitor ? &*monitor : nullptr);
    report.files_lost = report.restore.unrecoverable.size();
    report.alerts_raised = monitor ? monitor->alerts().size() : 0;

    for (const auto& [path, streams] : before) {
        if (!vol.exists(path)) continue;
        bool intact = is_canonical_linker(vol.peek_stream(path, ""));
        bool ads_same = true;
        for (const auto& [name, bytes] : streams) {
            if (name.empty()) continue;
            if (!vol.has_stream(path, name) || vol.peek_stream(path, name) != bytes) ads_same = false;
        }
        if (!ads_same)
            ++report.ads_divergent;
        else if (intact)
            ++report.recovered_intact;
    }
    return report;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
    Volume vol;
    Pid sys = build_synthetic_corpus(vol, cfg.corpus);

    LinkerMode lmode = cfg.mode == MonitorMode::AdvancedWithProxy ? LinkerMode::Advanced : LinkerMode::Basic;
    std::optional<Monitor> monitor;
    if (cfg.mode != MonitorMode::Off) monitor.emplace(vol, default_monitor_config(cfg.mode));
    convert_all(vol, sys, lmode, monitor ? &*monitor : nullptr);
    monitor.reset(); // run_scenario_on installs its own

    return run_scenario_on(vol, cfg);
}

// --- built-in families ---

static RansomwareFamily make_family(std::string name, bool ps1, std::string suffix, std::uint64_t seed) {
    RansomwareFamily f;
    f.name = std::move(name);
    f.extensions = {".txt", ".jpg", ".pdf", ".docx", ".xlsx", ".pptx"};
    if (ps1) f.extensions.insert(".ps1");
    f.rename_suffix = std::move(suffix);
    f.key_seed = seed;
    return f;
}

std::vector<RansomwareFamily> builtin_families() {
    return {
        make_family("wannacry", true, ".WNCRY", 11),
        make_family("gandcrab", true, ".GDCB", 12),
        make_family("cryptolocker-v3", false, ".clv3", 13),
        make_family("teslacrypt", false, ".ecc", 14),
        make_family("vipasana", false, ".xtbl", 15),
        make_family("locky", false, ".locky", 16),
        make_family("jigsaw", false, ".fun", 17),
        make_family("cerber", false, ".cerber", 18),
    };
}

std::vector<RansomwareFamily> future_families() {
    std::vector<RansomwareFamily> out;
    RansomwareFamily ads;
    ads.name = "ads-hunter";
    ads.targets_ads = true;
    ads.key_seed = 21;
    out.push_back(ads);

    RansomwareFamily linker;
    linker.name = "linker-replacer";
    linker.replaces_linkers = true;
    linker.key_seed = 22;
    out.push_back(linker);

    RansomwareFamily proxy;
    proxy.name = "proxy-killer";
    proxy.tampers_proxy = true;
    proxy.key_seed = 23;
    out.push_back(proxy);

    RansomwareFamily admin;
    admin.name = "admin-escalator";
    admin.seeks_admin = true;
    admin.targets_ads = true;
    admin.key_seed = 24;
    out.push_back(admin);

    RansomwareFamily puppeteer;
    puppeteer.name = "proxy-puppeteer";
    puppeteer.via_proxy = true;
    puppeteer.pace = 1; // interactive speed, not ransomware speed
    puppeteer.key_seed = 25;
    out.push_back(puppeteer);
    return out;
}

RansomwareFamily builtin_family(const std::string& name) {
    for (const auto& f : builtin_families())
        if (f.name == name) return f;
    for (const auto& f : future_families())
        if (f.name == name) return f;
    fail(Errc::ConfigInvalid, "unknown family " + name);
}

std::vector<ScenarioConfig> builtin_suite() {
    std::vector<ScenarioConfig> out;
    for (const RansomwareFamily& f : builtin_families()) {
        for (MonitorMode mode : {MonitorMode::Off, MonitorMode::AdvancedWithProxy}) {
            ScenarioConfig cfg;
            cfg.id = f.name + "-" + monitor_mode_name(mode);
            cfg.family = f;
            cfg.mode = mode;
            out.push_back(cfg);
        }
    }
    for (const RansomwareFamily& f : future_families()) {
        ScenarioConfig cfg;
        cfg.id = "future-" + f.name;
        cfg.family = f;
        cfg.mode = MonitorMode::AdvancedWithProxy;
        out.push_back(cfg);
    }
    return out;
}

} // namespace paufsim
