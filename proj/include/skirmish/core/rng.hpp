// PCG32 generator with a SplitMix64 seeder. Standard-library distributions
// are implementation-defined, so all draws go through these helpers.
#pragma once

#include <cstdint>

namespace skirmish {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Pcg32 {
public:
    explicit Pcg32(uint64_t seed = 1u, uint64_t stream = 54u) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    // Derives a generator from a seed plus one or two salt values, so
    // independent subsystems (spawn jitter, mixture sampling, exploration)
    // never share a stream.
    static Pcg32 derive(uint64_t seed, uint64_t salt_a, uint64_t salt_b = 0) {
        uint64_t s = seed ^ (salt_a * 0x9E3779B97F4A7C15ull);
        uint64_t mixed = splitmix64(s);
        uint64_t stream = splitmix64(s) ^ salt_b;
        return Pcg32(mixed, stream);
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be positive.
    uint32_t next_below(uint32_t n) { return next_u32() % n; }

private:
    uint64_t state_ = 0;
    uint64_t inc_ = 1;
};

}  // namespace skirmish
