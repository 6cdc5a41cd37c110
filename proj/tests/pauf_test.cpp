#include "paufsim/pauf.hpp"

#include "paufsim/monitor.hpp"

#include <doctest.h>

#include <random>

using namespace paufsim;

namespace {

Bytes rand_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

} // namespace

TEST_CASE("convert moves data to the ADS and installs the linker") {
    Volume vol;
    Pid pid = vol.register_process("user");
    Bytes data = to_bytes("This is my file data!");
    vol.create_file(pid, "docs/note.txt", data);

    PaufFile f = convert(vol, pid, "docs/note.txt", LinkerMode::Basic);
    CHECK(f.path == "docs/note.txt.ps1");
    CHECK(f.ads_name == "Data1.txt");
    CHECK_FALSE(vol.exists("docs/note.txt"));
    CHECK(vol.exists(f.path));
    CHECK(vol.peek_stream(f.path, f.ads_name) == data);

    Bytes lnk = vol.peek_stream(f.path, "");
    CHECK(lnk.size() == kLinkerSize);
    CHECK(is_canonical_linker(lnk));
    CHECK(parse_linker_mode(lnk) == LinkerMode::Basic);

    // 264 + 21 fits in one record: both streams stay resident
    CHECK(vol.allocated_clusters() == 0);
    CHECK(is_pauf(vol, f.path));
    CHECK_FALSE(is_pauf(vol, "missing"));
}

TEST_CASE("convert of a large file adds no extra clusters") {
    Volume vol;
    Pid pid = vol.register_process("user");
    std::mt19937_64 rng(1);
    Bytes data = rand_bytes(rng, 10 * 1024);
    vol.create_file(pid, "docs/big.pdf", data);
    std::uint64_t before = vol.allocated_clusters();

    PaufFile f = convert(vol, pid, "docs/big.pdf", LinkerMode::Basic);
    CHECK(vol.allocated_clusters() == before); // ADS non-resident, linker resident
    CHECK(vol.peek_stream(f.path, f.ads_name) == data);
    CHECK(vol.stat(f.path) == kLinkerSize);
}

TEST_CASE("convert of a small file keeps the overhead under a kilobyte") {
    Volume vol;
    Pid pid = vol.register_process("user");
    vol.create_file(pid, "docs/tiny.txt", to_bytes("hi"));
    CHECK(vol.external_bytes() == 0);
    convert(vol, pid, "docs/tiny.txt", LinkerMode::Basic);
    CHECK(vol.allocated_clusters() == 0);
    CHECK(vol.external_bytes() < 1024);
}

TEST_CASE("convert rejects double conversion and missing files") {
    Volume vol;
    Pid pid = vol.register_process("user");
    vol.create_file(pid, "a.txt", to_bytes("x"));
    PaufFile f = convert(vol, pid, "a.txt", LinkerMode::Basic);
    CHECK_THROWS_AS(convert(vol, pid, f.path, LinkerMode::Basic), Error);
    CHECK_THROWS_AS(convert(vol, pid, "nope.txt", LinkerMode::Basic), Error);
}

TEST_CASE("revert restores the original file exactly") {
    Volume vol;
    Pid pid = vol.register_process("user");
    Bytes data = to_bytes("round trip me");
    vol.create_file(pid, "docs/r.txt", data);
    std::uint64_t digest = vol.state_digest();

    PaufFile f = convert(vol, pid, "docs/r.txt", LinkerMode::Advanced);
    revert(vol, pid, f.path);
    CHECK(vol.exists("docs/r.txt"));
    CHECK(vol.peek_stream("docs/r.txt", "") == data);
    CHECK_FALSE(vol.has_stream("docs/r.txt", "Data1.txt"));
    CHECK(vol.state_digest() == digest);
}

TEST_CASE("revert distinguishes non-PAUFs from damaged PAUFs") {
    Volume vol;
    Pid pid = vol.register_process("user");
    vol.create_file(pid, "plain.txt", to_bytes("not converted"));
    CHECK_THROWS_AS(revert(vol, pid, "plain.txt"), Error);
    try {
        revert(vol, pid, "plain.txt");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotPauf);
    }

    vol.create_file(pid, "victim.txt", to_bytes("data"));
    PaufFile f = convert(vol, pid, "victim.txt", LinkerMode::Basic);
    vol.delete_stream(pid, f.path, f.ads_name);
    try {
        revert(vol, pid, f.path);
        FAIL("expected AdsMissing");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AdsMissing);
    }
}

TEST_CASE("property: convert/revert round-trips payloads from 0 bytes to 2 MB") {
    std::mt19937_64 rng(42);
    std::vector<std::size_t> sizes = {0, 1, 663, 664, 665, 4096, 65536};
    for (int i = 0; i < 6; ++i)
        sizes.push_back(static_cast<std::size_t>(rng() % (2 * 1024 * 1024 + 1)));

    for (std::size_t n : sizes) {
        Volume vol;
        Pid pid = vol.register_process("user");
        Bytes data = rand_bytes(rng, n);
        vol.create_file(pid, "docs/f.docx", data);
        std::uint64_t clusters_before = vol.allocated_clusters();
        std::uint64_t bytes_before = vol.external_bytes();
        std::uint64_t digest = vol.state_digest();

        PaufFile f = convert(vol, pid, "docs/f.docx", LinkerMode::Basic);
        CHECK(vol.peek_stream(f.path, f.ads_name) == data);
        CHECK(vol.stat(f.path) == kLinkerSize);
        // storage overhead: large files gain no clusters; small files gain
        // less than a kilobyte of external bytes
        if (n > kResidentCapacity)
            CHECK(vol.allocated_clusters() == clusters_before);
        CHECK(vol.external_bytes() < bytes_before + 1024);
        vol.check_invariants();

        revert(vol, pid, f.path);
        CHECK(vol.peek_stream("docs/f.docx", "") == data);
        CHECK(vol.state_digest() == digest);
    }
}

TEST_CASE("open/save flow edits through a temp file") {
    Volume vol;
    Pid pid = vol.register_process("user");
    vol.create_file(pid, "docs/doc.txt", to_bytes("v1"));
    PaufFile f = convert(vol, pid, "docs/doc.txt", LinkerMode::Basic);

    PaufWorkspace ws("tmp");
    std::string seen;
    ws.set_launch_callback([&](const std::string& p) { seen = p; });

    TempFileHandle h = ws.open_pauf(vol, pid, f.path);
    CHECK(h.temp_path == seen);
    CHECK(path_extension(h.temp_path) == ".txt"); // app sees the real extension
    CHECK(vol.peek_stream(h.temp_path, "") == to_bytes("v1"));

    // a second open of the same PAUF while the temp is live is refused
    try {
        ws.open_pauf(vol, pid, f.path);
        FAIL("expected TempAlreadyOpen");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TempAlreadyOpen);
    }

    ws.save_pauf(vol, pid, h, to_bytes("v2 edited"));
    CHECK(vol.peek_stream(f.path, f.ads_name) == to_bytes("v2 edited"));
    CHECK_FALSE(vol.exists(h.temp_path)); // temp cleaned up
    CHECK(vol.peek_stream(f.path, "").size() == kLinkerSize); // linker untouched

    // the handle is dead after save
    try {
        ws.save_pauf(vol, pid, h, to_bytes("again"));
        FAIL("expected StaleHandle");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::StaleHandle);
    }

    // and the PAUF can be opened again
    TempFileHandle h2 = ws.open_pauf(vol, pid, f.path);
    CHECK(vol.peek_stream(h2.temp_path, "") == to_bytes("v2 edited"));
}

TEST_CASE("advanced-mode PAUFs only open through the proxy") {
    Volume vol;
    Pid user = vol.register_process("user");
    Pid proxy = vol.register_process("freedom-proxy");
    vol.create_file(user, "docs/s.txt", to_bytes("secret"));
    PaufFile f = convert(vol, user, "docs/s.txt", LinkerMode::Advanced);

    PaufWorkspace ws("tmp");
    try {
        ws.open_pauf(vol, user, f.path);
        FAIL("expected NotProxy");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotProxy);
    }
    TempFileHandle h = ws.open_pauf(vol, proxy, f.path);
    ws.save_pauf(vol, proxy, h, to_bytes("updated"));
    CHECK(vol.peek_stream(f.path, f.ads_name) == to_bytes("updated"));
}

TEST_CASE("restore strips rename suffixes and rewrites mangled linkers") {
    Volume vol;
    Pid user = vol.register_process("user");
    vol.create_file(user, "docs/a.txt", to_bytes("alpha"));
    vol.create_file(user, "docs/b.pdf", to_bytes("beta"));
    PaufFile a = convert(vol, user, "docs/a.txt", LinkerMode::Basic);
    PaufFile b = convert(vol, user, "docs/b.pdf", LinkerMode::Basic);

    Pid mal = vol.register_process("mal");
    vol.write_stream(mal, a.path, "", to_bytes("GARBAGE"));
    vol.rename(mal, a.path, a.path + ".WNCRY");
    std::mt19937_64 rng(3);
    vol.write_stream(mal, b.path, "", rand_bytes(rng, kLinkerSize));

    RestoreOptions opts;
    opts.pid = vol.register_process("system", true);
    opts.mode = LinkerMode::Basic;
    opts.suffixes = default_rename_suffixes();
    // "user" converted these files, so its ADS writes are legitimate
    opts.trusted_labels = {"system", "freedom-proxy", "user"};
    RestoreReport r = restore_volume(vol, opts);

    CHECK(r.scanned == 2);
    CHECK(r.linkers_replaced == 2);
    CHECK(r.unrecoverable.empty());
    CHECK(vol.exists(a.path));
    CHECK(vol.peek_stream(a.path, a.ads_name) == to_bytes("alpha"));
    CHECK(is_canonical_linker(vol.peek_stream(a.path, "")));
    CHECK(vol.peek_stream(b.path, b.ads_name) == to_bytes("beta"));
    CHECK(is_canonical_linker(vol.peek_stream(b.path, "")));

    // idempotent: a second pass changes nothing
    std::uint64_t digest = vol.state_digest();
    RestoreReport r2 = restore_volume(vol, opts);
    CHECK(r2.linkers_replaced == 0);
    CHECK(vol.state_digest() == digest);
}

TEST_CASE("restore reports ADS damage as unrecoverable") {
    Volume vol;
    Pid user = vol.register_process("user");
    vol.create_file(user, "docs/x.txt", to_bytes("x data"));
    vol.create_file(user, "docs/y.txt", to_bytes("y data"));
    PaufFile x = convert(vol, user, "docs/x.txt", LinkerMode::Basic);
    PaufFile y = convert(vol, user, "docs/y.txt", LinkerMode::Basic);

    Pid mal = vol.register_process("mal");
    vol.write_stream(mal, x.path, x.ads_name, to_bytes("ENCRYPTED"));
    vol.delete_stream(mal, y.path, y.ads_name);

    RestoreOptions opts;
    opts.pid = vol.register_process("system", true);
    opts.suffixes = default_rename_suffixes();
    opts.trusted_labels = {"system", "freedom-proxy"};
    RestoreReport r = restore_volume(vol, opts);

    REQUIRE(r.unrecoverable.size() == 2);
    CHECK(r.scanned >= 1);

    // trusted edits are not damage: the proxy writing the ADS is fine
    Volume vol2;
    Pid u2 = vol2.register_process("user");
    Pid proxy = vol2.register_process("freedom-proxy");
    vol2.create_file(u2, "docs/z.txt", to_bytes("z"));
    PaufFile z = convert(vol2, u2, "docs/z.txt", LinkerMode::Basic);
    vol2.write_stream(proxy, z.path, z.ads_name, to_bytes("edited by proxy"));
    RestoreReport r2 = restore_volume(vol2, opts);
    CHECK(r2.unrecoverable.empty());
    CHECK(vol2.peek_stream(z.path, z.ads_name) == to_bytes("edited by proxy"));
}

TEST_CASE("snapshot captures every PAUF stream") {
    Volume vol;
    Pid user = vol.register_process("user");
    vol.create_file(user, "docs/a.txt", to_bytes("one"));
    vol.create_file(user, "plain.txt", to_bytes("ignored"));
    PaufFile a = convert(vol, user, "docs/a.txt", LinkerMode::Basic);

    PaufSnapshot snap = snapshot_paufs(vol);
    REQUIRE(snap.size() == 1);
    CHECK(snap.at(a.path).at(a.ads_name) == to_bytes("one"));
    CHECK(snap.at(a.path).count(""));
}
