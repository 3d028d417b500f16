#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace verbatim {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xCBF29CE484222325ull);

std::string to_hex(std::uint64_t value);

std::string read_file(const std::string& path);       // throws IoError
void write_file(const std::string& path, std::string_view content);

std::string_view trim(std::string_view s);

// Current wall-clock time in milliseconds since the Unix epoch.
std::int64_t now_unix_ms();

}  // namespace verbatim
