#include "paufsim/vfs.hpp"

#include <algorithm>

namespace paufsim {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::PathExists: return "PathExists";
    case Errc::NoSuchFile: return "NoSuchFile";
    case Errc::NoSuchStream: return "NoSuchStream";
    case Errc::ProcessNotRunning: return "ProcessNotRunning";
    case Errc::AccessDenied: return "AccessDenied";
    case Errc::AlreadyConverted: return "AlreadyConverted";
    case Errc::NotPauf: return "NotPauf";
    case Errc::AdsMissing: return "AdsMissing";
    case Errc::TempAlreadyOpen: return "TempAlreadyOpen";
    case Errc::NotProxy: return "NotProxy";
    case Errc::StaleHandle: return "StaleHandle";
    case Errc::UninstallDenied: return "UninstallDenied";
    case Errc::MonitorInstalled: return "MonitorInstalled";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::BadImage: return "BadImage";
    }
    return "Unknown";
}

const char* verb_name(Verb v) {
    switch (v) {
    case Verb::Create: return "Create";
    case Verb::ReadDefault: return "ReadDefault";
    case Verb::WriteDefault: return "WriteDefault";
    case Verb::ReadNamed: return "ReadNamed";
    case Verb::WriteNamed: return "WriteNamed";
    case Verb::DeleteFile: return "DeleteFile";
    case Verb::DeleteStream: return "DeleteStream";
    case Verb::Rename: return "Rename";
    }
    return "Unknown";
}

bool is_read_verb(Verb v) {
    return v == Verb::ReadDefault || v == Verb::ReadNamed;
}

// --- processes ---

Pid Volume::register_process(const std::string& label, bool privileged) {
    Pid pid = next_pid_++;
    processes_[pid] = ProcessDescriptor{pid, label, privileged, ProcessState::Running};
    return pid;
}

const ProcessDescriptor& Volume::process(Pid pid) const {
    auto it = processes_.find(pid);
    if (it == processes_.end()) fail(Errc::ProcessNotRunning, "unknown pid " + std::to_string(pid));
    return it->second;
}

void Volume::set_process_state(Pid pid, ProcessState state) {
    auto it = processes_.find(pid);
    if (it == processes_.end()) fail(Errc::ProcessNotRunning, "unknown pid " + std::to_string(pid));
    // Terminated is final.
    if (it->second.state == ProcessState::Terminated && state != ProcessState::Terminated)
        fail(Errc::ProcessNotRunning, "pid " + std::to_string(pid) + " is terminated");
    it->second.state = state;
}

const ProcessDescriptor& Volume::require_running(Pid pid) const {
    const ProcessDescriptor& p = process(pid);
    if (p.state != ProcessState::Running)
        fail(Errc::ProcessNotRunning, p.label + " (pid " + std::to_string(pid) + ")");
    return p;
}

// --- stream storage ---

Bytes Volume::load_stream(const StreamRecord& s) const {
    if (s.resident) return s.data;
    Bytes out;
    out.reserve(s.length);
    for (std::uint64_t id : s.chain) {
        auto it = clusters_.find(id);
        if (it == clusters_.end()) fail(Errc::BadImage, "dangling cluster " + std::to_string(id));
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    out.resize(s.length);
    return out;
}

void Volume::free_chain(StreamRecord& s) {
    for (std::uint64_t id : s.chain) clusters_.erase(id);
    s.chain.clear();
}

void Volume::store_stream(StreamRecord& s, Bytes data, bool resident) {
    std::uint64_t len = data.size();
    if (resident) {
        free_chain(s);
        s.resident = true;
        s.data = std::move(data);
        s.length = len;
        return;
    }
    free_chain(s);
    s.resident = false;
    s.data.clear();
    s.length = len;
    for (std::uint64_t off = 0; off < len; off += kClusterSize) {
        std::uint64_t n = std::min<std::uint64_t>(kClusterSize, len - off);
        std::uint64_t id = next_cluster_++;
        clusters_[id] = Bytes(data.begin() + off, data.begin() + off + n);
        s.chain.push_back(id);
    }
    if (len == 0) {
        // zero-length non-resident never happens; keep it resident instead
        s.resident = true;
    }
}

void Volume::relayout(MftEntry& e) {
    std::uint64_t remaining = kResidentCapacity;
    auto place = [&](StreamRecord& s) {
        if (s.length <= remaining) {
            if (!s.resident) store_stream(s, load_stream(s), true);
            remaining -= s.length;
        } else if (s.resident) {
            store_stream(s, load_stream(s), false);
        }
    };
    place(e.default_stream);
    for (auto& [name, s] : e.named_streams) place(s);
}

// --- events & guards ---

void Volume::append_event(IoEvent ev) {
    ev.seq = next_seq_++;
    ev.tick = clock_;
    ev.read = is_read_verb(ev.verb);
    events_.push_back(std::move(ev));
}

void Volume::deny(Pid pid, Verb verb, const std::string& path, const std::string& stream,
                  const std::string& new_path, const std::string& what) {
    IoEvent ev;
    ev.pid = pid;
    ev.verb = verb;
    ev.path = path;
    ev.stream = stream;
    ev.new_path = new_path;
    ev.denied = true;
    append_event(std::move(ev));
    fail(Errc::AccessDenied, what);
}

void Volume::enforce_guard(Pid pid, Verb verb, const std::string& path, const std::string& stream,
                           const std::string& new_path) {
    if (is_read_verb(verb)) return;
    const ProcessDescriptor& p = process(pid);
    if (trusted_labels_.count(p.label)) return;

    if (guarded_paths_.count(path))
        deny(pid, verb, path, stream, new_path, path + " is a protected system file");

    auto it = guarded_streams_.find(path);
    if (it == guarded_streams_.end()) return;
    bool hits = false;
    switch (verb) {
    case Verb::WriteNamed:
        hits = it->second.count(stream) > 0;
        break;
    case Verb::DeleteStream:
        hits = !stream.empty() && it->second.count(stream) > 0;
        break;
    case Verb::DeleteFile:
        // deleting the file would take the guarded stream with it
        hits = !it->second.empty();
        break;
    default:
        break;
    }
    if (hits)
        deny(pid, verb, path, stream, new_path, path + ":" + stream + " is a protected data stream");
}

// --- file operations ---

MftEntry& Volume::require_entry(const std::string& path) {
    auto it = entries_.find(path);
    if (it == entries_.end()) fail(Errc::NoSuchFile, path);
    return it->second;
}

const MftEntry& Volume::require_entry(const std::string& path) const {
    auto it = entries_.find(path);
    if (it == entries_.end()) fail(Errc::NoSuchFile, path);
    return it->second;
}

void Volume::create_file(Pid pid, const std::string& path, const Bytes& data) {
    const ProcessDescriptor& p = require_running(pid);
    if (entries_.count(path)) fail(Errc::PathExists, path);
    MftEntry e;
    e.path = path;
    e.default_stream.last_writer = p.label;
    entries_[path] = std::move(e);
    MftEntry& stored = entries_[path];
    store_stream(stored.default_stream, data, data.size() <= kResidentCapacity);
    relayout(stored);
    IoEvent ev;
    ev.pid = pid;
    ev.verb = Verb::Create;
    ev.path = path;
    ev.data = data;
    append_event(std::move(ev));
    check_invariants();
}

void Volume::write_stream(Pid pid, const std::string& path, const std::string& stream, const Bytes& data) {
    const ProcessDescriptor& p = require_running(pid);
    MftEntry& e = require_entry(path);
    Verb verb = stream.empty() ? Verb::WriteDefault : Verb::WriteNamed;
    enforce_guard(pid, verb, path, stream);
    StreamRecord& s = stream.empty() ? e.default_stream : e.named_streams[stream];
    store_stream(s, data, data.size() <= kResidentCapacity);
    s.last_writer = p.label;
    relayout(e);
    IoEvent ev;
    ev.pid = pid;
    ev.verb = verb;
    ev.path = path;
    ev.stream = stream;
    ev.data = data;
    append_event(std::move(ev));
    check_invariants();
}

Bytes Volume::read_stream(Pid pid, const std::string& path, const std::string& stream) {
    require_running(pid);
    Bytes out = peek_stream(path, stream);
    IoEvent ev;
    ev.pid = pid;
    ev.verb = stream.empty() ? Verb::ReadDefault : Verb::ReadNamed;
    ev.path = path;
    ev.stream = stream;
    append_event(std::move(ev));
    return out;
}

Bytes Volume::peek_stream(const std::string& path, const std::string& stream) const {
    const MftEntry& e = require_entry(path);
    if (stream.empty()) return load_stream(e.default_stream);
    auto it = e.named_streams.find(stream);
    if (it == e.named_streams.end()) fail(Errc::NoSuchStream, path + ":" + stream);
    return load_stream(it->second);
}

void Volume::delete_file(Pid pid, const std::string& path) {
    require_running(pid);
    MftEntry& e = require_entry(path);
    enforce_guard(pid, Verb::DeleteFile, path, "");
    free_chain(e.default_stream);
    for (auto& [name, s] : e.named_streams) free_chain(s);
    entries_.erase(path);
    guarded_streams_.erase(path);
    guarded_paths_.erase(path);
    IoEvent ev;
    ev.pid = pid;
    ev.verb = Verb::DeleteFile;
    ev.path = path;
    append_event(std::move(ev));
    check_invariants();
}

void Volume::delete_stream(Pid pid, const std::string& path, const std::string& stream) {
    const ProcessDescriptor& p = require_running(pid);
    MftEntry& e = require_entry(path);
    enforce_guard(pid, Verb::DeleteStream, path, stream);
    if (stream.empty()) {
        // deleting the default stream empties it; the entry itself stays
        store_stream(e.default_stream, Bytes{}, true);
        e.default_stream.last_writer = p.label;
    } else {
        auto it = e.named_streams.find(stream);
        if (it == e.named_streams.end()) fail(Errc::NoSuchStream, path + ":" + stream);
        free_chain(it->second);
        e.named_streams.erase(it);
    }
    relayout(e);
    IoEvent ev;
    ev.pid = pid;
    ev.verb = Verb::DeleteStream;
    ev.path = path;
    ev.stream = stream;
    append_event(std::move(ev));
    check_invariants();
}

void Volume::rename(Pid pid, const std::string& old_path, const std::string& new_path) {
    require_running(pid);
    require_entry(old_path);
    if (entries_.count(new_path)) fail(Errc::PathExists, new_path);
    enforce_guard(pid, Verb::Rename, old_path, "", new_path);
    auto node = entries_.extract(old_path);
    node.key() = new_path;
    node.mapped().path = new_path;
    entries_.insert(std::move(node));
    // guards follow the entry
    if (auto g = guarded_streams_.extract(old_path); !g.empty()) {
        g.key() = new_path;
        guarded_streams_.insert(std::move(g));
    }
    if (guarded_paths_.erase(old_path)) guarded_paths_.insert(new_path);
    IoEvent ev;
    ev.pid = pid;
    ev.verb = Verb::Rename;
    ev.path = old_path;
    ev.new_path = new_path;
    append_event(std::move(ev));
    check_invariants();
}

bool Volume::exists(const std::string& path) const { return entries_.count(path) > 0; }

bool Volume::has_stream(const std::string& path, const std::string& stream) const {
    auto it = entries_.find(path);
    if (it == entries_.end()) return false;
    if (stream.empty()) return true;
    return it->second.named_streams.count(stream) > 0;
}

std::uint64_t Volume::stat(const std::string& path) const {
    return require_entry(path).default_stream.length;
}

std::vector<std::pair<std::string, std::uint64_t>> Volume::list_directory(const std::string& prefix) const {
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for (const auto& [path, e] : entries_) {
        if (path.rfind(prefix, 0) == 0) out.emplace_back(path, e.default_stream.length);
    }
    return out;
}

std::vector<StreamInfo> Volume::enumerate_streams(const std::string& prefix) const {
    std::vector<StreamInfo> out;
    for (const auto& [path, e] : entries_) {
        if (path.rfind(prefix, 0) != 0) continue;
        out.push_back({path, "", e.default_stream.length, e.default_stream.resident});
        for (const auto& [name, s] : e.named_streams)
            out.push_back({path, name, s.length, s.resident});
    }
    return out;
}

const MftEntry& Volume::entry(const std::string& path) const { return require_entry(path); }

// --- clock ---

std::vector<Tick> Volume::advance_clock(Tick ms) {
    Tick old = clock_;
    clock_ += ms;
    std::vector<Tick> due;
    Tick first = (old / poll_interval_ + 1) * poll_interval_;
    for (Tick t = first; t <= clock_; t += poll_interval_) due.push_back(t);
    return due;
}

void Volume::set_poll_interval(Tick ms) {
    if (ms == 0) fail(Errc::ConfigInvalid, "poll interval must be positive");
    poll_interval_ = ms;
}

// --- accounting & digest ---

std::uint64_t Volume::external_bytes() const {
    std::uint64_t total = 0;
    for (const auto& [path, e] : entries_) {
        if (!e.default_stream.resident) total += e.default_stream.length;
        for (const auto& [name, s] : e.named_streams)
            if (!s.resident) total += s.length;
    }
    return total;
}

void Volume::check_invariants() const {
    std::uint64_t expected = 0;
    std::uint64_t resident_bytes = 0;
    for (const auto& [path, e] : entries_) {
        resident_bytes = kHeaderOverhead;
        auto visit = [&](const StreamRecord& s) {
            if (s.resident) {
                if (s.data.size() != s.length) fail(Errc::BadImage, "resident length mismatch at " + path);
                resident_bytes += s.length;
            } else {
                expected += (s.length + kClusterSize - 1) / kClusterSize;
                std::uint64_t got = 0;
                for (std::uint64_t id : s.chain) {
                    auto it = clusters_.find(id);
                    if (it == clusters_.end()) fail(Errc::BadImage, "dangling cluster ref at " + path);
                    got += it->second.size();
                }
                if (got < s.length) fail(Errc::BadImage, "short cluster chain at " + path);
            }
        };
        visit(e.default_stream);
        for (const auto& [name, s] : e.named_streams) visit(s);
        if (resident_bytes > kEntryCapacity) fail(Errc::BadImage, "record overflow at " + path);
    }
    if (expected != clusters_.size()) fail(Errc::BadImage, "cluster accounting mismatch");
}

std::uint64_t Volume::state_digest() const {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a 64
    auto mix = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    auto mix_u64 = [&](std::uint64_t v) { mix(&v, sizeof v); };
    auto mix_str = [&](const std::string& s) {
        mix_u64(s.size());
        mix(s.data(), s.size());
    };
    auto mix_stream = [&](const StreamRecord& s) {
        mix_u64(s.resident ? 1 : 0);
        mix_u64(s.length);
        Bytes data = load_stream(s);
        mix(data.data(), data.size());
    };
    mix_u64(entries_.size());
    for (const auto& [path, e] : entries_) {
        mix_str(path);
        mix_stream(e.default_stream);
        mix_u64(e.named_streams.size());
        for (const auto& [name, s] : e.named_streams) {
            mix_str(name);
            mix_stream(s);
        }
    }
    mix_u64(clusters_.size());
    return h;
}

// --- guards ---

void Volume::guard_stream(const std::string& path, const std::string& stream) {
    guarded_streams_[path].insert(stream);
}

void Volume::unguard_stream(const std::string& path, const std::string& stream) {
    auto it = guarded_streams_.find(path);
    if (it == guarded_streams_.end()) return;
    it->second.erase(stream);
    if (it->second.empty()) guarded_streams_.erase(it);
}

void Volume::guard_path(const std::string& path) { guarded_paths_.insert(path); }
void Volume::unguard_path(const std::string& path) { guarded_paths_.erase(path); }

void Volume::clear_guards() {
    guarded_streams_.clear();
    guarded_paths_.clear();
}

// --- replay ---

Volume replay_log(const std::vector<IoEvent>& log) {
    Volume v;
    std::map<Pid, Pid> pids; // original pid -> replay pid
    auto ensure = [&](Pid pid) {
        auto it = pids.find(pid);
        if (it == pids.end()) it = pids.emplace(pid, v.register_process("replay-" + std::to_string(pid))).first;
        return it->second;
    };
    Tick tick = 0;
    for (const IoEvent& ev : log) {
        tick = std::max(tick, ev.tick);
        if (ev.read || ev.denied) continue;
        Pid pid = ensure(ev.pid);
        switch (ev.verb) {
        case Verb::Create: v.create_file(pid, ev.path, ev.data); break;
        case Verb::WriteDefault:
        case Verb::WriteNamed: v.write_stream(pid, ev.path, ev.stream, ev.data); break;
        case Verb::DeleteFile: v.delete_file(pid, ev.path); break;
        case Verb::DeleteStream: v.delete_stream(pid, ev.path, ev.stream); break;
        case Verb::Rename: v.rename(pid, ev.path, ev.new_path); break;
        default: break;
        }
    }
    v.advance_clock(tick);
    return v;
}

} // namespace paufsim
