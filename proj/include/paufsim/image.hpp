#pragma once

#include "paufsim/vfs.hpp"

#include <string>

namespace paufsim {

// Volume image format: magic "PAUFVOL1", version u16, then length-prefixed
// little-endian records (processes, entries with streams and residency,
// cluster blobs, event log, clock). save(load(x)) == x byte for byte.
inline constexpr const char* kImageMagic = "PAUFVOL1";
inline constexpr std::uint16_t kImageVersion = 1;

Bytes save_image(const Volume& vol);
Volume load_image(const Bytes& data);

void save_image_file(const Volume& vol, const std::string& path);
Volume load_image_file(const std::string& path);

} // namespace paufsim
