#pragma once

#include <cmath>
#include <cstdint>

namespace lorenzband {

// xoshiro256++ seeded through splitmix64. The generator and the
// distribution transforms below are pinned here so that a given seed
// produces the same stream on every platform, independent of the
// standard library's <random> distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    /// Derives an independent generator for (seed, stream); used to hand
    /// replications and Monte Carlo segments their own streams so that
    /// serial and parallel runs agree.
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t a = seed;
        std::uint64_t b = stream ^ 0x6a09e667f3bcc909ULL;
        return Rng(splitmix64(a) ^ splitmix64(b));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (-bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller; the paired value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// One-shot mix of several words into a derived seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = seed;
    auto next = [&x]() {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = next();
    x ^= a * 0xff51afd7ed558ccdULL;
    h ^= next();
    x ^= b * 0xc4ceb9fe1a85ec53ULL;
    h ^= next();
    return h;
}

}  // namespace lorenzband
