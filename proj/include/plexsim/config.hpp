#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "plexsim/engine.hpp"

namespace plexsim {

/// Parses the sectioned plain-text run configuration. The schema is strict:
/// unknown sections or keys and duplicate scalar keys are errors, so typos in
/// physical parameters cannot pass silently. Values accept explicit unit
/// suffixes (ms, us, V, mV, pS, um, ...) and are normalized internally.
/// Overrides are `key=value` or `section.key=value` strings applied on top
/// of the file. Throws ConfigError naming the offending field.
SimConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
SimConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Canonical text form: fixed section/key order, SI values printed with full
/// precision, placements listed explicitly. Parsing the echo reproduces the
/// same config, and echoing that config reproduces the same text.
std::string normalized_config(const SimConfig& config);

/// FNV-1a 64-bit over raw bytes; used to fingerprint config files in the run
/// manifest.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace plexsim
