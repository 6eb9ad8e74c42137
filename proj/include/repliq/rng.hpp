#ifndef REPLIQ_RNG_HPP
#define REPLIQ_RNG_HPP

#include <cmath>
#include <cstdint>

namespace repliq {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++, seeded via splitmix64. One instance per run/block, never shared.
class Rng {
    uint64_t s0_, s1_, s2_, s3_;

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        s0_ = splitmix64(sm);
        s1_ = splitmix64(sm);
        s2_ = splitmix64(sm);
        s3_ = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s0_ + s3_, 23) + s0_;
        const uint64_t t = s1_ << 17;
        s2_ ^= s0_;
        s3_ ^= s1_;
        s1_ ^= s2_;
        s0_ ^= s3_;
        s2_ ^= t;
        s3_ = rotl(s3_, 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // inversion of 1 - e^{-rate x}
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
};

// Deterministic sub-stream derivation: stream i of a base seed. Used to give
// every run (seed = base + run index) and every sample block its own generator.
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
    uint64_t s = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    return splitmix64(s);
}

} // namespace repliq

#endif
