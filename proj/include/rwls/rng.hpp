#pragma once

#include <cstdint>
#include <random>

namespace rwls {

using Rng = std::mt19937_64;

// Independent stream `index` derived from a master seed.
inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedu};
    return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Unbiased integer in [0, n) via multiply-and-reject on 32-bit halves.
inline std::uint32_t bounded(Rng& rng, std::uint32_t n) {
    for (;;) {
        std::uint64_t x = rng();
        for (int half = 0; half < 2; ++half, x >>= 32) {
            std::uint64_t m = (x & 0xffffffffu) * n;
            std::uint32_t low = static_cast<std::uint32_t>(m);
            if (low >= n || low >= (0u - n) % n) return static_cast<std::uint32_t>(m >> 32);
        }
    }
}

}  // namespace rwls
