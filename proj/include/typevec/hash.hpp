#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace typevec {

// FNV-1a, 64-bit. Used for token hashing, vocabulary ids, and file checksums.
// Fully specified so results are identical across platforms and builds.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a64(const void* bytes, std::size_t len,
                             std::uint64_t state = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
        state ^= static_cast<std::uint64_t>(p[i]);
        state *= kFnvPrime;
    }
    return state;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t state = kFnvOffset) {
    return fnv1a64(s.data(), s.size(), state);
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t state = kFnvOffset) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    return fnv1a64(buf, 8, state);
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace typevec
