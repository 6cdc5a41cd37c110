#pragma once

#include <cstdlib>
#include <string>

namespace paufsim {

// Temp directory for the open/save flow, overridable via PAUFSIM_TMPDIR.
inline std::string default_temp_dir() {
    const char* env = std::getenv("PAUFSIM_TMPDIR");
    return env && *env ? std::string(env) : std::string("tmp");
}

} // namespace paufsim
