#pragma once

#include <cstdint>
#include <random>

namespace knncp {

/// Engine for stream `stream` of a run seeded with `seed`. Streams are
/// independent of the order in which they are requested, so replicates can be
/// drawn in parallel and still reproduce exactly.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), domain};
    return std::mt19937_64(seq);
}

/// Uniform integer in [0, bound) by rejection, identical on every platform.
inline std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = engine();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

} // namespace knncp
