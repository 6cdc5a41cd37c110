#pragma once

#include "paufsim/common.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace paufsim {

// Fixed simulator geometry. A 1024-byte file record with 360 bytes of header
// bookkeeping leaves 664 bytes of usable resident space; payloads that do not
// fit spill to 4096-byte clusters.
inline constexpr std::uint64_t kEntryCapacity = 1024;
inline constexpr std::uint64_t kHeaderOverhead = 360;
inline constexpr std::uint64_t kResidentCapacity = kEntryCapacity - kHeaderOverhead;
inline constexpr std::uint64_t kClusterSize = 4096;

using Pid = std::uint32_t;
using Tick = std::uint64_t;

enum class Verb : std::uint8_t {
    Create,
    ReadDefault,
    WriteDefault,
    ReadNamed,
    WriteNamed,
    DeleteFile,
    DeleteStream,
    Rename,
};

const char* verb_name(Verb v);
bool is_read_verb(Verb v);

struct IoEvent {
    std::uint64_t seq = 0;
    Tick tick = 0;
    Pid pid = 0;
    Verb verb = Verb::Create;
    std::string path;
    std::string stream;   // empty = default stream
    std::string new_path; // Rename only
    Bytes data;           // payload for Create / Write*
    bool read = false;
    bool denied = false; // attempt blocked by an access guard, volume unchanged
};

struct StreamRecord {
    bool resident = true;
    Bytes data;                      // resident payload
    std::vector<std::uint64_t> chain; // non-resident cluster ids
    std::uint64_t length = 0;
    std::string last_writer; // label of the last process that wrote this stream
};

struct MftEntry {
    std::string path;
    StreamRecord default_stream;
    std::map<std::string, StreamRecord> named_streams;
};

enum class ProcessState : std::uint8_t { Running, Suspended, Terminated };

struct ProcessDescriptor {
    Pid pid = 0;
    std::string label;
    bool privileged = false;
    ProcessState state = ProcessState::Running;
};

struct StreamInfo {
    std::string path;
    std::string stream;
    std::uint64_t length = 0;
    bool resident = true;
};

// In-memory NTFS-like volume: fixed-size file records with default and named
// data streams, a cluster store for non-resident payloads, an attributed I/O
// event log and a logical millisecond clock. Single-writer by construction.
class Volume {
public:
    Volume() = default;

    // --- processes ---
    Pid register_process(const std::string& label, bool privileged = false);
    const ProcessDescriptor& process(Pid pid) const;
    void set_process_state(Pid pid, ProcessState state);
    const std::map<Pid, ProcessDescriptor>& processes() const { return processes_; }

    // --- file operations ---
    void create_file(Pid pid, const std::string& path, const Bytes& data);
    void write_stream(Pid pid, const std::string& path, const std::string& stream, const Bytes& data);
    Bytes read_stream(Pid pid, const std::string& path, const std::string& stream);
    // Snapshot read: no event logged. Used by reporting and tests.
    Bytes peek_stream(const std::string& path, const std::string& stream) const;
    void delete_file(Pid pid, const std::string& path);
    void delete_stream(Pid pid, const std::string& path, const std::string& stream);
    void rename(Pid pid, const std::string& old_path, const std::string& new_path);

    bool exists(const std::string& path) const;
    bool has_stream(const std::string& path, const std::string& stream) const;
    // Reported size is the default stream length; named streams never count.
    std::uint64_t stat(const std::string& path) const;
    std::vector<std::pair<std::string, std::uint64_t>> list_directory(const std::string& prefix = "") const;
    std::vector<StreamInfo> enumerate_streams(const std::string& prefix = "") const;
    const MftEntry& entry(const std::string& path) const;
    const std::map<std::string, MftEntry>& entries() const { return entries_; }

    // --- clock ---
    // Advances the logical clock and returns the poll deadlines crossed,
    // i.e. every multiple of the poll interval in (old clock, new clock].
    std::vector<Tick> advance_clock(Tick ms);
    Tick clock() const { return clock_; }
    void set_poll_interval(Tick ms);
    Tick poll_interval() const { return poll_interval_; }

    // --- event log ---
    const std::vector<IoEvent>& event_log() const { return events_; }

    // --- storage accounting ---
    std::uint64_t allocated_clusters() const { return clusters_.size(); }
    // Total bytes held outside file records (sum of non-resident lengths).
    std::uint64_t external_bytes() const;
    void check_invariants() const;

    // Digest over entries, stream layout and payload bytes; independent of the
    // event log, clock and process table. Equal digests = same volume state.
    std::uint64_t state_digest() const;

    // --- access guards (installed by the driver monitor) ---
    // A guarded target rejects mutations from processes whose label is not
    // trusted; the attempt is logged as a denied event.
    void guard_stream(const std::string& path, const std::string& stream);
    void unguard_stream(const std::string& path, const std::string& stream);
    void guard_path(const std::string& path);
    void unguard_path(const std::string& path);
    void clear_guards();
    void set_trusted_labels(const std::set<std::string>& labels) { trusted_labels_ = labels; }
    const std::set<std::string>& trusted_labels() const { return trusted_labels_; }

    bool monitor_installed() const { return monitor_installed_; }
    void set_monitor_installed(bool on) { monitor_installed_ = on; }

    friend struct ImageCodec;

private:
    const ProcessDescriptor& require_running(Pid pid) const;
    MftEntry& require_entry(const std::string& path);
    const MftEntry& require_entry(const std::string& path) const;
    Bytes load_stream(const StreamRecord& s) const;
    void store_stream(StreamRecord& s, Bytes data, bool resident);
    void free_chain(StreamRecord& s);
    // Recompute residency for all streams of an entry: default stream first,
    // then named streams in name order; resident iff the payload fits in the
    // remaining record space (ties resolve resident).
    void relayout(MftEntry& e);
    void append_event(IoEvent ev);
    void deny(Pid pid, Verb verb, const std::string& path, const std::string& stream,
              const std::string& new_path, const std::string& what);
    void enforce_guard(Pid pid, Verb verb, const std::string& path, const std::string& stream,
                       const std::string& new_path = "");

    std::map<std::string, MftEntry> entries_;
    std::map<std::uint64_t, Bytes> clusters_;
    std::vector<IoEvent> events_;
    std::map<Pid, ProcessDescriptor> processes_;
    Tick clock_ = 0;
    Tick poll_interval_ = 2000;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_cluster_ = 1;
    Pid next_pid_ = 1;

    std::map<std::string, std::set<std::string>> guarded_streams_;
    std::set<std::string> guarded_paths_;
    std::set<std::string> trusted_labels_;
    bool monitor_installed_ = false;
};

// Rebuilds a volume by applying the mutating events of a log in order.
// Read and denied events are skipped; every referenced pid is registered as
// Running. The result's state digest matches the original volume's.
Volume replay_log(const std::vector<IoEvent>& log);

} // namespace paufsim
