#pragma once

#include <cstdint>
#include <string_view>

namespace litho {

// splitmix64 step; used to derive independent stream seeds from one master
// seed so that per-well / per-fold / per-tree randomness is stable no matter
// the execution order.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_seed(master ^ mix_seed(stream + 0x51ed270b4a5ULL));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t stream) {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a offset
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return derive_seed(derive_seed(master, h), stream);
}

} // namespace litho
