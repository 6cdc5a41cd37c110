#include "paufsim/image.hpp"

#include <cstring>
#include <fstream>

namespace paufsim {

namespace {

class Writer {
public:
    explicit Writer(Bytes& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { raw(&v, 2); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void blob(const Bytes& b) {
        u64(b.size());
        out_.insert(out_.end(), b.begin(), b.end());
    }

private:
    void raw(const void* p, std::size_t n) {
        // little-endian on every supported target
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }

    Bytes& out_;
};

class Reader {
public:
    explicit Reader(const Bytes& in) : in_(in) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() { return le<std::uint16_t>(); }
    std::uint32_t u32() { return le<std::uint32_t>(); }
    std::uint64_t u64() { return le<std::uint64_t>(); }
    std::string str() {
        std::uint32_t n = u32();
        const std::uint8_t* p = take(n);
        return std::string(p, p + n);
    }
    Bytes blob() {
        std::uint64_t n = u64();
        const std::uint8_t* p = take(n);
        return Bytes(p, p + n);
    }
    bool done() const { return pos_ == in_.size(); }

private:
    template <typename T>
    T le() {
        const std::uint8_t* p = take(sizeof(T));
        T v = 0;
        std::memcpy(&v, p, sizeof(T));
        return v;
    }
    const std::uint8_t* take(std::size_t n) {
        if (pos_ + n > in_.size()) fail(Errc::BadImage, "truncated image");
        const std::uint8_t* p = in_.data() + pos_;
        pos_ += n;
        return p;
    }

    const Bytes& in_;
    std::size_t pos_ = 0;
};

void write_stream_record(Writer& w, const StreamRecord& s) {
    w.u8(s.resident ? 1 : 0);
    w.u64(s.length);
    w.str(s.last_writer);
    if (s.resident) {
        w.blob(s.data);
    } else {
        w.u32(static_cast<std::uint32_t>(s.chain.size()));
        for (std::uint64_t id : s.chain) w.u64(id);
    }
}

StreamRecord read_stream_record(Reader& r) {
    StreamRecord s;
    s.resident = r.u8() != 0;
    s.length = r.u64();
    s.last_writer = r.str();
    if (s.resident) {
        s.data = r.blob();
        if (s.data.size() != s.length) fail(Errc::BadImage, "resident length mismatch");
    } else {
        std::uint32_t n = r.u32();
        s.chain.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) s.chain.push_back(r.u64());
    }
    return s;
}

} // namespace

struct ImageCodec {
    static Bytes save(const Volume& v) {
        Bytes out;
        Writer w(out);
        out.insert(out.end(), kImageMagic, kImageMagic + 8);
        w.u16(kImageVersion);

        w.u64(v.clock_);
        w.u64(v.poll_interval_);
        w.u64(v.next_seq_);
        w.u64(v.next_cluster_);
        w.u32(v.next_pid_);

        w.u32(static_cast<std::uint32_t>(v.processes_.size()));
        for (const auto& [pid, p] : v.processes_) {
            w.u32(p.pid);
            w.str(p.label);
            w.u8(p.privileged ? 1 : 0);
            w.u8(static_cast<std::uint8_t>(p.state));
        }

        w.u32(static_cast<std::uint32_t>(v.entries_.size()));
        for (const auto& [path, e] : v.entries_) {
            w.str(path);
            write_stream_record(w, e.default_stream);
            w.u32(static_cast<std::uint32_t>(e.named_streams.size()));
            for (const auto& [name, s] : e.named_streams) {
                w.str(name);
                write_stream_record(w, s);
            }
        }

        w.u32(static_cast<std::uint32_t>(v.clusters_.size()));
        for (const auto& [id, block] : v.clusters_) {
            w.u64(id);
            w.blob(block);
        }

        w.u64(v.events_.size());
        for (const IoEvent& ev : v.events_) {
            w.u64(ev.seq);
            w.u64(ev.tick);
            w.u32(ev.pid);
            w.u8(static_cast<std::uint8_t>(ev.verb));
            w.str(ev.path);
            w.str(ev.stream);
            w.str(ev.new_path);
            w.blob(ev.data);
            w.u8((ev.read ? 1 : 0) | (ev.denied ? 2 : 0));
        }
        return out;
    }

    static Volume load(const Bytes& data) {
        if (data.size() < 10 || std::memcmp(data.data(), kImageMagic, 8) != 0)
            fail(Errc::BadImage, "bad magic");
        Reader r(data);
        for (int i = 0; i < 8; ++i) r.u8();
        if (r.u16() != kImageVersion) fail(Errc::BadImage, "unsupported version");

        Volume v;
        v.clock_ = r.u64();
        v.poll_interval_ = r.u64();
        v.next_seq_ = r.u64();
        v.next_cluster_ = r.u64();
        v.next_pid_ = r.u32();

        std::uint32_t nproc = r.u32();
        for (std::uint32_t i = 0; i < nproc; ++i) {
            ProcessDescriptor p;
            p.pid = r.u32();
            p.label = r.str();
            p.privileged = r.u8() != 0;
            p.state = static_cast<ProcessState>(r.u8());
            v.processes_[p.pid] = p;
        }

        std::uint32_t nent = r.u32();
        for (std::uint32_t i = 0; i < nent; ++i) {
            MftEntry e;
            e.path = r.str();
            e.default_stream = read_stream_record(r);
            std::uint32_t nstreams = r.u32();
            for (std::uint32_t j = 0; j < nstreams; ++j) {
                std::string name = r.str();
                e.named_streams[name] = read_stream_record(r);
            }
            v.entries_[e.path] = std::move(e);
        }

        std::uint32_t nclust = r.u32();
        for (std::uint32_t i = 0; i < nclust; ++i) {
            std::uint64_t id = r.u64();
            v.clusters_[id] = r.blob();
        }

        std::uint64_t nev = r.u64();
        for (std::uint64_t i = 0; i < nev; ++i) {
            IoEvent ev;
            ev.seq = r.u64();
            ev.tick = r.u64();
            ev.pid = r.u32();
            ev.verb = static_cast<Verb>(r.u8());
            ev.path = r.str();
            ev.stream = r.str();
            ev.new_path = r.str();
            ev.data = r.blob();
            std::uint8_t flags = r.u8();
            ev.read = flags & 1;
            ev.denied = flags & 2;
            v.events_.push_back(std::move(ev));
        }
        if (!r.done()) fail(Errc::BadImage, "trailing bytes");
        v.check_invariants();
        return v;
    }
};

Bytes save_image(const Volume& vol) { return ImageCodec::save(vol); }
Volume load_image(const Bytes& data) { return ImageCodec::load(data); }

void save_image_file(const Volume& vol, const std::string& path) {
    Bytes data = save_image(vol);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::BadImage, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

Volume load_image_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::BadImage, "cannot open " + path);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_image(data);
}

} // namespace paufsim
