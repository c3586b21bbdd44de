#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace qiforest {

// FNV-1a, used for stable stream keys and draw digests.
inline std::uint64_t fnv1a(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(std::string_view s) { return fnv1a(s.data(), s.size()); }

inline std::uint64_t fnv1a(std::span<const std::size_t> values) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t v : values) {
        const auto word = static_cast<std::uint64_t>(v);
        for (int shift = 0; shift < 64; shift += 8) {
            h ^= (word >> shift) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace qiforest
