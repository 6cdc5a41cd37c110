#include "paufsim/attacksim.hpp"
#include "paufsim/bench.hpp"
#include "paufsim/image.hpp"
#include "paufsim/monitor.hpp"
#include "paufsim/pauf.hpp"
#include "paufsim/report.hpp"
#include "paufsim/vfs.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace paufsim;

namespace {

py::bytes as_py(const Bytes& b) {
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

Bytes as_bytes(const py::bytes& b) {
    std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::object report_to_py(const ScenarioReport& r) {
    RunManifest manifest;
    manifest.command = "python run_scenario";
    manifest.corpus_seed = r.corpus.seed;
    py::module_ json = py::module_::import("json");
    return json.attr("loads")(scenario_report_text(r, manifest));
}

} // namespace

PYBIND11_MODULE(_paufsim, m) {
    m.doc() = "Simulator of an ADS-based anti-ransomware scheme: protected files, "
              "driver monitor and scripted attack families.";

    py::register_exception<Error>(m, "PaufsimError");

    py::enum_<LinkerMode>(m, "LinkerMode")
        .value("Basic", LinkerMode::Basic)
        .value("Advanced", LinkerMode::Advanced);

    py::enum_<MonitorMode>(m, "MonitorMode")
        .value("Off", MonitorMode::Off)
        .value("BasicLinker", MonitorMode::BasicLinker)
        .value("AdvancedWithProxy", MonitorMode::AdvancedWithProxy);

    py::class_<Volume>(m, "Volume")
        .def(py::init<>())
        .def("register_process", &Volume::register_process, py::arg("label"),
             py::arg("privileged") = false)
        .def("create_file",
             [](Volume& v, Pid pid, const std::string& path, const py::bytes& data) {
                 v.create_file(pid, path, as_bytes(data));
             })
        .def("write_stream",
             [](Volume& v, Pid pid, const std::string& path, const std::string& stream,
                const py::bytes& data) { v.write_stream(pid, path, stream, as_bytes(data)); })
        .def("read_stream",
             [](Volume& v, Pid pid, const std::string& path, const std::string& stream) {
                 return as_py(v.read_stream(pid, path, stream));
             })
        .def("peek_stream",
             [](const Volume& v, const std::string& path, const std::string& stream) {
                 return as_py(v.peek_stream(path, stream));
             })
        .def("delete_file", &Volume::delete_file)
        .def("delete_stream", &Volume::delete_stream)
        .def("rename", &Volume::rename)
        .def("stat", &Volume::stat)
        .def("exists", &Volume::exists)
        .def("list_directory", &Volume::list_directory, py::arg("prefix") = "")
        .def("enumerate_streams",
             [](const Volume& v, const std::string& prefix) {
                 std::vector<std::tuple<std::string, std::string, std::uint64_t, bool>> out;
                 for (const StreamInfo& s : v.enumerate_streams(prefix))
                     out.emplace_back(s.path, s.stream, s.length, s.resident);
                 return out;
             },
             py::arg("prefix") = "")
        .def("advance_clock", &Volume::advance_clock)
        .def("clock", &Volume::clock)
        .def("allocated_clusters", &Volume::allocated_clusters)
        .def("external_bytes", &Volume::external_bytes)
        .def("state_digest", &Volume::state_digest)
        .def("event_count", [](const Volume& v) { return v.event_log().size(); });

    m.def("convert",
          [](Volume& v, Pid pid, const std::string& path, LinkerMode mode) {
              PaufFile f = convert(v, pid, path, mode);
              return py::make_tuple(f.path, f.ads_name);
          },
          py::arg("volume"), py::arg("pid"), py::arg("path"), py::arg("mode") = LinkerMode::Basic);
    m.def("revert", [](Volume& v, Pid pid, const std::string& path) { revert(v, pid, path); });
    m.def("is_pauf", &is_pauf);
    m.def("render_linker", [](LinkerMode mode, const std::string& path, const std::string& ext) {
        return as_py(render_linker(mode, path, ext));
    });
    m.def("is_canonical_linker",
          [](const py::bytes& data) { return is_canonical_linker(as_bytes(data)); });

    m.def("restore",
          [](Volume& v, LinkerMode mode) {
              RestoreOptions opts;
              opts.pid = v.register_process("system", true);
              opts.mode = mode;
              opts.suffixes = default_rename_suffixes();
              opts.trusted_labels = {"system", "freedom-proxy"};
              RestoreReport r = restore_volume(v, opts);
              py::dict out;
              out["scanned"] = r.scanned;
              out["linkers_replaced"] = r.linkers_replaced;
              out["recovered"] = r.recovered;
              out["unrecoverable"] = r.unrecoverable;
              return out;
          },
          py::arg("volume"), py::arg("mode") = LinkerMode::Basic);

    m.def("build_synthetic_corpus",
          [](Volume& v, std::uint64_t count, std::uint64_t min_size, std::uint64_t max_size,
             std::uint64_t seed) {
              return build_synthetic_corpus(v, CorpusSpec{count, min_size, max_size, seed});
          },
          py::arg("volume"), py::arg("count") = 40, py::arg("min_size") = 256,
          py::arg("max_size") = 8192, py::arg("seed") = 7);
    m.def("convert_all",
          [](Volume& v, Pid pid, LinkerMode mode) { return convert_all(v, pid, mode); },
          py::arg("volume"), py::arg("pid"), py::arg("mode") = LinkerMode::Basic);

    m.def("builtin_scenarios", [] {
        std::vector<std::string> ids;
        for (const ScenarioConfig& c : builtin_suite()) ids.push_back(c.id);
        return ids;
    });
    m.def("run_scenario",
          [](const std::string& id, std::uint64_t corpus_count) {
              for (ScenarioConfig c : builtin_suite())
                  if (c.id == id) {
                      if (corpus_count) c.corpus.count = corpus_count;
                      return report_to_py(run_scenario(c));
                  }
              fail(Errc::ConfigInvalid, "unknown scenario '" + id + "'");
          },
          py::arg("id"), py::arg("corpus_count") = 0);

    m.def("save_image", [](const Volume& v, const std::string& path) { save_image_file(v, path); });
    m.def("load_image", [](const std::string& path) { return load_image_file(path); });

    m.attr("ENTRY_CAPACITY") = kEntryCapacity;
    m.attr("RESIDENT_CAPACITY") = kResidentCapacity;
    m.attr("CLUSTER_SIZE") = kClusterSize;
    m.attr("LINKER_SIZE") = kLinkerSize;
    m.attr("__version__") = kToolVersion;
}
