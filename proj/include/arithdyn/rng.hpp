#pragma once

#include <cstdint>
#include <cmath>

namespace arithdyn {

// Counter-based splittable RNG. Every consumer derives an independent stream
// from (seed, stream ids); the same ids always give the same stream, no matter
// how many threads draw from other streams. Core generator is xoshiro256**
// seeded through splitmix64.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    static Rng stream(uint64_t seed, uint64_t a) { return Rng(mix(mix(seed, 0x9e3779b97f4a7c15ull), a)); }
    static Rng stream(uint64_t seed, uint64_t a, uint64_t b) { return Rng(mix(mix(mix(seed, 0x9e3779b97f4a7c15ull), a), b)); }
    static Rng stream(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
        return Rng(mix(mix(mix(mix(seed, 0x9e3779b97f4a7c15ull), a), b), c));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform integer in [0, n), bias-free (rejection on the top range).
    uint64_t uniform(uint64_t n) {
        const uint64_t limit = ~uint64_t(0) - ~uint64_t(0) % n;
        uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    // Uniform integer in [lo, hi] inclusive.
    int64_t uniform_in(int64_t lo, int64_t hi) { return lo + int64_t(uniform(uint64_t(hi - lo + 1))); }

    // Uniform double in [0, 1).
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    float uniform01f() { return float(next_u64() >> 40) * 0x1.0p-24f; }

    // Standard normal via Box-Muller (one value per call; the pair is not cached
    // so the stream position stays simple to reason about).
    double normal() {
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
        return splitmix64(x);
    }

    uint64_t s_[4];
};

} // namespace arithdyn
