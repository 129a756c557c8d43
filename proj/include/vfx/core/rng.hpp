#pragma once

#include <cstdint>
#include <random>

namespace vfx {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t value) {
    return splitmix64(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

/// PCG32 (O'Neill). Small state, cheap to seed per pixel.
class Pcg32 {
public:
    explicit Pcg32(uint64_t seed, uint64_t stream = 0x14057b7ef767814fULL) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += seed;
        next_u32();
    }

    uint32_t next_u32() {
        const uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31));
    }

    // Uniform in [0, 1).
    double next_double() {
        const uint64_t hi = next_u32();
        const uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

private:
    uint64_t state_ = 0;
    uint64_t inc_ = 0;
};

/// Seeded stream for program-level randomness. The mapping to [0,1) and to
/// integer ranges is spelled out here so results do not depend on the
/// standard library's distribution implementations.
class SeedStream {
public:
    explicit SeedStream(uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n).
    uint64_t index(uint64_t n) { return n == 0 ? 0 : static_cast<uint64_t>(uniform() * n) % n; }
    uint64_t next_seed() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace vfx
