#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "litho/core.hpp"

namespace litho {

// Columnar binary encoding of a WellFrame (the cache/<well>/<hole>.frame
// format). Round-trip is exact on every field including missing markers.
std::vector<std::uint8_t> encode_frame(const WellFrame& frame);
WellFrame decode_frame(std::span<const std::uint8_t> bytes);

void write_frame_file(const std::string& path, const WellFrame& frame);
WellFrame read_frame_file(const std::string& path);

} // namespace litho
