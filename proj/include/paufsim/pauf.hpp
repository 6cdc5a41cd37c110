#pragma once

#include "paufsim/linker.hpp"
#include "paufsim/pauf_defaults.hpp"
#include "paufsim/vfs.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace paufsim {

class Monitor;

// Converted files are renamed with this suffix: the linker in their default
// stream is a PowerShell script, and extension-based attackers see it as one.
inline constexpr const char* kLinkerExt = ".ps1";

struct PaufFile {
    std::string path;     // linker path, i.e. original path + kLinkerExt
    std::string ads_name; // "Data1" + original extension
    LinkerMode mode = LinkerMode::Basic;
};

// True if the entry owns a protected-data ADS (the sole PAUF marker).
bool is_pauf(const Volume& vol, const std::string& path);
// Name of the protected ADS stream, "" if the entry has none.
std::string find_protected_ads(const Volume& vol, const std::string& path);

// Moves the default-stream bytes into a named ADS, installs the 264-byte
// canonical linker as the default stream and renames the file with the
// linker extension. Registers the new PAUF with the monitor when given.
PaufFile convert(Volume& vol, Pid pid, const std::string& path, LinkerMode mode,
                 Monitor* monitor = nullptr);

// Inverse of convert: restores the original bytes, stream layout and path.
void revert(Volume& vol, Pid pid, const std::string& linker_path, Monitor* monitor = nullptr);

struct TempFileHandle {
    std::uint64_t id = 0;
    std::string temp_path;
    std::string source_path;
    std::string ads_name;
    Tick opened_at = 0;
};

// The open/save flow: ADS bytes are copied to a temporary normal file with
// the original extension, handed to the application, and copied back on
// save. At most one live temp file per PAUF path.
class PaufWorkspace {
public:
    explicit PaufWorkspace(std::string temp_dir = default_temp_dir(),
                           std::string proxy_label = "freedom-proxy")
        : temp_dir_(std::move(temp_dir)), proxy_label_(std::move(proxy_label)) {}

    // Callback invoked with the temp path in place of launching a real
    // application.
    void set_launch_callback(std::function<void(const std::string&)> cb) { launch_ = std::move(cb); }

    TempFileHandle open_pauf(Volume& vol, Pid pid, const std::string& path);
    void save_pauf(Volume& vol, Pid pid, const TempFileHandle& handle, const Bytes& edited);

    const std::string& temp_dir() const { return temp_dir_; }
    const std::string& proxy_label() const { return proxy_label_; }

private:
    std::string temp_dir_;
    std::string proxy_label_;
    std::function<void(const std::string&)> launch_;
    std::map<std::string, TempFileHandle> live_; // source path -> handle
    std::uint64_t next_id_ = 1;
};

struct RestoreReport {
    std::uint64_t scanned = 0;
    std::uint64_t linkers_replaced = 0;
    std::vector<std::string> recovered;
    std::vector<std::string> unrecoverable; // ADS modified by an untrusted process, or deleted
};

struct RestoreOptions {
    Pid pid = 0;                          // restorer process (its label should be trusted)
    LinkerMode mode = LinkerMode::Basic;  // template used for replacement linkers
    std::vector<std::string> suffixes;    // known ransomware rename suffixes to strip
    std::set<std::string> trusted_labels; // writers whose ADS edits are legitimate
};

// Two-step recovery: locate every entry owning a protected ADS, strip known
// rename suffixes and rewrite non-canonical default streams with the
// canonical linker. Total: failures are reported, never thrown. Idempotent.
RestoreReport restore_volume(Volume& vol, const RestoreOptions& opts, Monitor* monitor = nullptr);

// Default suffix list: the rename suffixes of the built-in attack families.
std::vector<std::string> default_rename_suffixes();

// path -> (stream -> bytes) capture of all PAUF entries, for byte-identical
// recovery checks.
using PaufSnapshot = std::map<std::string, std::map<std::string, Bytes>>;
PaufSnapshot snapshot_paufs(const Volume& vol);

} // namespace paufsim
