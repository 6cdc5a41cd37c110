#include "paufsim/linker.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

namespace paufsim {

const char* linker_mode_name(LinkerMode m) {
    return m == LinkerMode::Basic ? "basic" : "advanced";
}

std::string path_extension(const std::string& path) {
    auto slash = path.find_last_of('/');
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot == std::string::npos || dot == 0) return "";
    return name.substr(dot);
}

std::string ads_stream_name(const std::string& ext) { return "Data1" + ext; }

bool is_protected_ads_name(const std::string& stream) {
    if (stream == "Data1") return true;
    return stream.rfind("Data1.", 0) == 0;
}

std::string extension_from_ads_name(const std::string& stream) {
    if (!is_protected_ads_name(stream) || stream == "Data1") return "";
    return stream.substr(5); // ".ext"
}

Bytes render_linker(LinkerMode mode, const std::string& path, const std::string& ext) {
    std::string text = kLinkerMagic;
    text += linker_mode_name(mode);
    text += '|';
    std::string ads = path + ":" + ads_stream_name(ext);
    if (mode == LinkerMode::Basic) {
        // $data1 = linker, $data2 = temp copy, $data3 = protected ADS stream
        text += "$data1='" + path + "';";
        text += "$data2=$env:TMP+'~pauf" + ext + "';";
        text += "$data3='" + ads + "';";
        text += "cp $data3 $data2;start $data2;cp $data2 $data3;del $data2";
    } else {
        text += "$data1='" + path + "';";
        text += "$data3='" + ads + "';";
        text += "& freedom-proxy.exe $data1 $data3";
    }
    Bytes out(text.begin(), text.end());
    if (out.size() > kLinkerSize - 1) out.resize(kLinkerSize - 1); // keep at least one pad byte
    out.resize(kLinkerSize, 0);
    return out;
}

bool is_canonical_linker(const Bytes& bytes) {
    return parse_linker_mode(bytes).has_value();
}

std::optional<LinkerMode> parse_linker_mode(const Bytes& bytes) {
    if (bytes.size() != kLinkerSize) return std::nullopt;
    const std::size_t magic_len = std::strlen(kLinkerMagic);
    if (std::memcmp(bytes.data(), kLinkerMagic, magic_len) != 0) return std::nullopt;

    std::size_t pos = magic_len;
    LinkerMode mode;
    if (bytes.size() > pos + 6 && std::memcmp(bytes.data() + pos, "basic|", 6) == 0) {
        mode = LinkerMode::Basic;
        pos += 6;
    } else if (bytes.size() > pos + 9 && std::memcmp(bytes.data() + pos, "advanced|", 9) == 0) {
        mode = LinkerMode::Advanced;
        pos += 9;
    } else {
        return std::nullopt;
    }
    // printable command text followed by zero padding only
    std::size_t i = pos;
    while (i < kLinkerSize && bytes[i] != 0) {
        if (bytes[i] < 0x20 || bytes[i] > 0x7e) return std::nullopt;
        ++i;
    }
    if (i == kLinkerSize) return std::nullopt; // no padding at all
    for (; i < kLinkerSize; ++i)
        if (bytes[i] != 0) return std::nullopt;
    return mode;
}

} // namespace paufsim
