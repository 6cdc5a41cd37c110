#include "paufsim/attacksim.hpp"
#include "paufsim/bench.hpp"
#include "paufsim/config.hpp"
#include "paufsim/image.hpp"
#include "paufsim/pauf.hpp"
#include "paufsim/pauf_defaults.hpp"
#include "paufsim/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace paufsim;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 2;
constexpr int kExitConfig = 3;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Errc::ConfigInvalid, "cannot write " + path);
    out << text;
}

Pid find_or_register(Volume& vol, const std::string& label, bool privileged) {
    for (const auto& [pid, p] : vol.processes())
        if (p.label == label && p.state == ProcessState::Running) return pid;
    return vol.register_process(label, privileged);
}

int cmd_init(const std::string& image, bool synthetic, std::uint64_t count, std::uint64_t min_size,
             std::uint64_t max_size, std::uint64_t seed, const std::string& ingest_dir) {
    Volume vol;
    if (!ingest_dir.empty()) {
        Pid sys = vol.register_process("system", true);
        vol.create_file(sys, kProxyExecutable, to_bytes("MZ freedom proxy application"));
        vol.create_file(sys, kDriverFile, to_bytes("freedom kernel driver"));
        vol.create_file(sys, kAppFile, to_bytes("MZ freedom system application"));
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(ingest_dir))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const fs::path& p : files) {
            std::ifstream in(p, std::ios::binary);
            Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            std::string rel = fs::relative(p, ingest_dir).generic_string();
            vol.create_file(sys, std::string(kDocsDir) + rel, data);
        }
    } else if (synthetic) {
        CorpusSpec spec{count, min_size, max_size, seed};
        build_synthetic_corpus(vol, spec);
    } else {
        fail(Errc::ConfigInvalid, "init needs --synthetic or --ingest");
    }
    save_image_file(vol, image);
    std::cout << "wrote " << image << " with " << vol.entries().size() << " entries\n";
    return kExitOk;
}

int cmd_convert_all(const std::string& image, const std::string& mode_str) {
    Volume vol = load_image_file(image);
    LinkerMode mode = mode_str == "advanced" ? LinkerMode::Advanced : LinkerMode::Basic;
    Pid sys = find_or_register(vol, "system", true);
    std::size_t n = convert_all(vol, sys, mode);
    save_image_file(vol, image);
    std::cout << "converted " << n << " files\n";
    return kExitOk;
}

int cmd_attack(const std::string& image, const std::string& scenario, const std::string& monitor,
               const std::string& out_path) {
    ScenarioConfig cfg;
    std::vector<std::string> config_paths;
    if (fs::exists(scenario)) {
        cfg = load_scenario_file(scenario);
        config_paths.push_back(scenario);
    } else {
        bool found = false;
        for (const ScenarioConfig& c : builtin_suite())
            if (c.id == scenario || c.family.name == scenario) {
                cfg = c;
                found = true;
                break;
            }
        if (!found) fail(Errc::ConfigInvalid, "unknown scenario '" + scenario + "'");
    }
    if (!monitor.empty()) {
        auto mode = parse_monitor_mode(monitor);
        if (!mode) fail(Errc::ConfigInvalid, "--monitor expects off|basic|advanced");
        cfg.mode = *mode;
        cfg.id = cfg.family.name + "-" + monitor_mode_name(cfg.mode);
    }

    Volume vol = load_image_file(image);
    ScenarioReport report = run_scenario_on(vol, cfg);
    save_image_file(vol, image);

    RunManifest manifest;
    manifest.command = "attack --image " + image + " --scenario " + scenario;
    manifest.config_paths = config_paths;
    manifest.corpus_seed = cfg.corpus.seed;
    manifest.output_path = out_path;
    std::string text = scenario_report_text(report, manifest);
    if (!out_path.empty()) write_text(out_path, text);
    std::cout << text;
    return kExitOk;
}

int cmd_restore(const std::string& image, const std::string& out_path) {
    Volume vol = load_image_file(image);
    RestoreOptions opts;
    opts.pid = find_or_register(vol, "system", true);
    opts.mode = LinkerMode::Basic;
    opts.suffixes = default_rename_suffixes();
    opts.trusted_labels = {"system", "freedom-proxy"};
    // match the mode of any surviving canonical linker
    for (const auto& [path, e] : vol.entries()) {
        auto mode = parse_linker_mode(vol.peek_stream(path, ""));
        if (mode) {
            opts.mode = *mode;
            break;
        }
    }
    RestoreReport report = restore_volume(vol, opts);
    save_image_file(vol, image);

    RunManifest manifest;
    manifest.command = "restore --image " + image;
    manifest.output_path = out_path;
    json doc{{"restore", to_json(report)}, {"manifest", to_json(manifest)}};
    std::string text = doc.dump(2) + "\n";
    if (!out_path.empty()) write_text(out_path, text);
    std::cout << text;
    return kExitOk;
}

int cmd_bench(const std::string& sizes_str, int reps, const std::string& out_path) {
    std::vector<std::uint64_t> sizes;
    std::string item;
    std::istringstream in(sizes_str);
    while (std::getline(in, item, ','))
        if (!item.empty()) sizes.push_back(std::stoull(item));
    if (sizes.empty()) fail(Errc::ConfigInvalid, "--sizes expects a comma-separated list of byte counts");
    BenchResult result = run_bench(sizes, reps);
    std::string text = bench_table(result);
    if (!out_path.empty()) write_text(out_path, text);
    std::cout << text;
    return kExitOk;
}

int cmd_report(const std::string& image, const std::string& out_path) {
    Volume vol = load_image_file(image);
    std::uint64_t pauf_count = 0;
    for (const auto& [path, e] : vol.entries())
        if (is_pauf(vol, path)) ++pauf_count;
    RunManifest manifest;
    manifest.command = "report --image " + image;
    manifest.output_path = out_path;
    json doc{
        {"entries", vol.entries().size()},
        {"pauf_files", pauf_count},
        {"allocated_clusters", vol.allocated_clusters()},
        {"external_bytes", vol.external_bytes()},
        {"events", vol.event_log().size()},
        {"clock_ms", vol.clock()},
        {"state_digest", vol.state_digest()},
        {"manifest", to_json(manifest)},
    };
    std::string text = doc.dump(2) + "\n";
    if (!out_path.empty()) write_text(out_path, text);
    std::cout << text;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FREEDOM anti-ransomware simulator"};
    app.require_subcommand(1);

    auto* init = app.add_subcommand("init", "Build a volume image from a synthetic or ingested corpus");
    std::string image, ingest_dir;
    std::uint64_t count = 100, min_size = 10 * 1024, max_size = 1024 * 1024, seed = 7;
    bool synthetic = false;
    init->add_option("--image", image)->required();
    init->add_flag("--synthetic", synthetic);
    init->add_option("--count", count);
    init->add_option("--min", min_size);
    init->add_option("--max", max_size);
    init->add_option("--seed", seed);
    init->add_option("--ingest", ingest_dir);

    auto* conv = app.add_subcommand("convert-all", "Convert every eligible file to the protected format");
    std::string conv_image, conv_mode = "basic";
    conv->add_option("--image", conv_image)->required();
    conv->add_option("--mode", conv_mode)->check(CLI::IsMember({"basic", "advanced"}));

    auto* attack = app.add_subcommand("attack", "Run an attack scenario against the image");
    std::string atk_image, atk_scenario, atk_monitor, atk_out;
    attack->add_option("--image", atk_image)->required();
    attack->add_option("--scenario", atk_scenario)->required();
    attack->add_option("--monitor", atk_monitor);
    attack->add_option("--out", atk_out);

    auto* restore = app.add_subcommand("restore", "Recover protected files after an attack");
    std::string rst_image, rst_out;
    restore->add_option("--image", rst_image)->required();
    restore->add_option("--out", rst_out);

    auto* bench = app.add_subcommand("bench", "Measure convert and open+save cost per file size");
    std::string bench_sizes = "10240,102400,1048576,10485760,104857600", bench_out;
    int bench_reps = 5;
    bench->add_option("--sizes", bench_sizes);
    bench->add_option("--reps", bench_reps);
    bench->add_option("--out", bench_out);

    auto* report = app.add_subcommand("report", "Summarize a volume image");
    std::string rpt_image, rpt_out;
    report->add_option("--image", rpt_image)->required();
    report->add_option("--out", rpt_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (init->parsed()) return cmd_init(image, synthetic, count, min_size, max_size, seed, ingest_dir);
        if (conv->parsed()) return cmd_convert_all(conv_image, conv_mode);
        if (attack->parsed()) return cmd_attack(atk_image, atk_scenario, atk_monitor, atk_out);
        if (restore->parsed()) return cmd_restore(rst_image, rst_out);
        if (bench->parsed()) return cmd_bench(bench_sizes, bench_reps, bench_out);
        if (report->parsed()) return cmd_report(rpt_image, rpt_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::ConfigInvalid ? kExitConfig : kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}
