#pragma once

#include "paufsim/common.hpp"

#include <optional>
#include <string>

namespace paufsim {

// Linker files are exactly 264 bytes: a magic prefix identifying the template
// mode, the rendered command text, then zero padding.
inline constexpr std::size_t kLinkerSize = 264;
inline constexpr const char* kLinkerMagic = "PAUF-LNK1|";

enum class LinkerMode { Basic, Advanced };

const char* linker_mode_name(LinkerMode m);

// Extension of the last path component, dot included ("" if none).
std::string path_extension(const std::string& path);

// ADS stream name carrying the user data for a file with extension `ext`
// (dot included), e.g. ".txt" -> "Data1.txt".
std::string ads_stream_name(const std::string& ext);

// True if `stream` follows the protected-data naming convention.
bool is_protected_ads_name(const std::string& stream);

// Original extension encoded in an ADS stream name ("Data1.txt" -> ".txt").
std::string extension_from_ads_name(const std::string& stream);

// Deterministic 264-byte linker for the given mode, linker path and original
// extension. Same inputs always yield identical bytes.
Bytes render_linker(LinkerMode mode, const std::string& path, const std::string& ext);

// Accepts exactly the outputs of render_linker for some (mode, path, ext).
bool is_canonical_linker(const Bytes& bytes);

// Mode encoded in a canonical linker, nullopt if the bytes are not canonical.
std::optional<LinkerMode> parse_linker_mode(const Bytes& bytes);

} // namespace paufsim
