#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace paufsim {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

enum class Errc {
    PathExists,
    NoSuchFile,
    NoSuchStream,
    ProcessNotRunning,
    AccessDenied,
    AlreadyConverted,
    NotPauf,
    AdsMissing,
    TempAlreadyOpen,
    NotProxy,
    StaleHandle,
    UninstallDenied,
    MonitorInstalled,
    ConfigInvalid,
    BadImage,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) {
    throw Error(code, detail);
}

} // namespace paufsim
