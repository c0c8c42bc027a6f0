#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace litho {

// Hex-encoded SHA-256; content digests key the pipeline cache.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);
std::string sha256_file_hex(const std::string& path); // throws DataError if unreadable

} // namespace litho
