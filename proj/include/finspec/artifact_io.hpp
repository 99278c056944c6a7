#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace finspec {

// Locale-independent decimal text with 17 significant digits: parses back to
// the identical binary64 value.
std::string format_double(double v);

// FNV-1a 64-bit hash; stable across platforms, used for config provenance.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex16(std::uint64_t v);

// Provenance line embedded as the first row of every CSV artifact.
std::string csv_provenance(const std::string& command, const std::string& config_hash);

// Writes through a sibling temp file and renames over the target, so readers
// never observe a partial artifact.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace finspec
