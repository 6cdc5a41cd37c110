#include "paufsim/pauf.hpp"

#include "paufsim/monitor.hpp"

#include <algorithm>
#include <cstdio>

namespace paufsim {

bool is_pauf(const Volume& vol, const std::string& path) {
    return !find_protected_ads(vol, path).empty();
}

std::string find_protected_ads(const Volume& vol, const std::string& path) {
    if (!vol.exists(path)) return "";
    for (const auto& [name, s] : vol.entry(path).named_streams)
        if (is_protected_ads_name(name)) return name;
    return "";
}

static std::string strip_suffix(const std::string& path, const std::string& suffix) {
    if (suffix.empty() || path.size() <= suffix.size()) return path;
    if (path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return path.substr(0, path.size() - suffix.size());
    return path;
}

PaufFile convert(Volume& vol, Pid pid, const std::string& path, LinkerMode mode, Monitor* monitor) {
    if (!vol.exists(path)) fail(Errc::NoSuchFile, path);
    if (is_pauf(vol, path)) fail(Errc::AlreadyConverted, path);

    std::string ext = path_extension(path);
    std::string ads = ads_stream_name(ext);
    if (vol.has_stream(path, ads)) fail(Errc::AlreadyConverted, path + " already carries " + ads);

    std::string linker_path = path + kLinkerExt;
    if (vol.exists(linker_path)) fail(Errc::PathExists, linker_path);

    Bytes data = vol.read_stream(pid, path, "");
    vol.write_stream(pid, path, ads, data);
    vol.write_stream(pid, path, "", render_linker(mode, linker_path, ext));
    vol.rename(pid, path, linker_path);

    PaufFile out{linker_path, ads, mode};
    if (monitor) monitor->register_pauf(out.path, out.ads_name);
    return out;
}

void revert(Volume& vol, Pid pid, const std::string& linker_path, Monitor* monitor) {
    if (!vol.exists(linker_path)) fail(Errc::NoSuchFile, linker_path);
    std::string ads = find_protected_ads(vol, linker_path);
    if (ads.empty()) {
        if (is_canonical_linker(vol.peek_stream(linker_path, "")))
            fail(Errc::AdsMissing, linker_path);
        fail(Errc::NotPauf, linker_path);
    }
    if (monitor) monitor->deregister(linker_path);
    Bytes data = vol.read_stream(pid, linker_path, ads);
    vol.write_stream(pid, linker_path, "", data);
    vol.delete_stream(pid, linker_path, ads);
    std::string original = strip_suffix(linker_path, kLinkerExt);
    if (original != linker_path && !vol.exists(original))
        vol.rename(pid, linker_path, original);
}

TempFileHandle PaufWorkspace::open_pauf(Volume& vol, Pid pid, const std::string& path) {
    std::string ads = find_protected_ads(vol, path);
    if (ads.empty()) fail(Errc::NotPauf, path);
    if (live_.count(path)) fail(Errc::TempAlreadyOpen, path);

    LinkerMode mode = parse_linker_mode(vol.peek_stream(path, "")).value_or(LinkerMode::Basic);
    if (mode == LinkerMode::Advanced && vol.process(pid).label != proxy_label_) {
        // the attempt still shows up in the event log
        vol.read_stream(pid, path, ads);
        fail(Errc::NotProxy, vol.process(pid).label + " is not the proxy application");
    }

    char name[32];
    std::snprintf(name, sizeof name, "~tmp%04llu", static_cast<unsigned long long>(next_id_));
    TempFileHandle h;
    h.id = next_id_++;
    h.source_path = path;
    h.ads_name = ads;
    h.temp_path = temp_dir_ + "/" + name + extension_from_ads_name(ads);
    h.opened_at = vol.clock();

    Bytes data = vol.read_stream(pid, path, ads);
    vol.create_file(pid, h.temp_path, data);
    live_[path] = h;
    if (launch_) launch_(h.temp_path);
    return h;
}

void PaufWorkspace::save_pauf(Volume& vol, Pid pid, const TempFileHandle& handle, const Bytes& edited) {
    auto it = live_.find(handle.source_path);
    if (it == live_.end() || it->second.id != handle.id)
        fail(Errc::StaleHandle, handle.source_path);

    LinkerMode mode = parse_linker_mode(vol.peek_stream(handle.source_path, "")).value_or(LinkerMode::Basic);
    if (mode == LinkerMode::Advanced && vol.process(pid).label != proxy_label_)
        fail(Errc::NotProxy, vol.process(pid).label + " is not the proxy application");

    vol.write_stream(pid, handle.temp_path, "", edited);
    vol.write_stream(pid, handle.source_path, handle.ads_name, edited);
    vol.delete_file(pid, handle.temp_path);
    live_.erase(it);
}

std::vector<std::string> default_rename_suffixes() {
    return {".WNCRY", ".GDCB", ".clv3", ".ecc", ".xtbl", ".locky", ".fun", ".cerber"};
}

RestoreReport restore_volume(Volume& vol, const RestoreOptions& opts, Monitor* monitor) {
    RestoreReport report;

    // ADS streams deleted outright leave no entry to enumerate; the event log
    // is the only witness.
    for (const IoEvent& ev : vol.event_log()) {
        if (ev.denied || ev.verb != Verb::DeleteStream) continue;
        if (!is_protected_ads_name(ev.stream)) continue;
        auto pit = vol.processes().find(ev.pid);
        std::string label = pit == vol.processes().end() ? "" : pit->second.label;
        if (opts.trusted_labels.count(label)) continue; // revert flows delete legitimately
        if (find_protected_ads(vol, ev.path).empty())
            report.unrecoverable.push_back(ev.path);
    }

    std::vector<std::string> pauf_paths;
    for (const auto& [path, e] : vol.entries())
        if (!find_protected_ads(vol, path).empty()) pauf_paths.push_back(path);

    for (const std::string& path : pauf_paths) {
        ++report.scanned;
        std::string ads = find_protected_ads(vol, path);
        const StreamRecord& rec = vol.entry(path).named_streams.at(ads);
        if (!opts.trusted_labels.count(rec.last_writer)) {
            report.unrecoverable.push_back(path);
            continue;
        }

        std::string target = path;
        for (const std::string& sfx : opts.suffixes) {
            std::string stripped = strip_suffix(target, sfx);
            if (stripped != target) {
                target = stripped;
                break;
            }
        }
        if (target != path && !vol.exists(target)) {
            vol.rename(opts.pid, path, target);
            if (monitor) {
                monitor->deregister(path);
            }
        } else {
            target = path;
        }

        std::string ext = extension_from_ads_name(ads);
        Bytes canonical = render_linker(opts.mode, target, ext);
        if (vol.peek_stream(target, "") != canonical) {
            vol.write_stream(opts.pid, target, "", canonical);
            ++report.linkers_replaced;
        }
        if (monitor) monitor->register_pauf(target, ads);
        report.recovered.push_back(target);
    }

    std::sort(report.recovered.begin(), report.recovered.end());
    std::sort(report.unrecoverable.begin(), report.unrecoverable.end());
    report.unrecoverable.erase(std::unique(report.unrecoverable.begin(), report.unrecoverable.end()),
                               report.unrecoverable.end());
    return report;
}

PaufSnapshot snapshot_paufs(const Volume& vol) {
    PaufSnapshot snap;
    for (const auto& [path, e] : vol.entries()) {
        if (find_protected_ads(vol, path).empty()) continue;
        auto& streams = snap[path];
        streams[""] = vol.peek_stream(path, "");
        for (const auto& [name, s] : e.named_streams) streams[name] = vol.peek_stream(path, name);
    }
    return snap;
}

} // namespace paufsim
