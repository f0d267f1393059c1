#pragma once

#include <cstdint>
#include <random>

#include "latsnf/numeric.hpp"

namespace latsnf {

// All randomness in the toolkit flows from a single master seed.  Independent
// substreams (one per trial, per subsystem) are derived by hashing the master
// seed with a stream index, so runs are reproducible regardless of how many
// draws each trial consumes and of the order trials execute in.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed)
        : eng_(mix(seed)), seed_mix_(mix(seed)) {}

    // Derived, statistically independent substream.
    RngStream derive(std::uint64_t subsystem, std::uint64_t index) const {
        std::uint64_t s = seed_mix_;
        s = mix(s ^ (0x9e3779b97f4a7c15ULL + subsystem));
        s = mix(s ^ (0xbf58476d1ce4e5b9ULL + index));
        return RngStream(s, true);
    }

    std::uint64_t next() { return eng_(); }

    // Unbiased uniform draw from [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    // Uniform in [0, n) for big integers, by rejection on fixed-width words.
    Int below_int(const Int& n) {
        if (n <= 0) return 0;
        std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
        std::size_t words = (bits + 63) / 64;
        while (true) {
            Int v = 0;
            for (std::size_t w = 0; w < words; ++w) {
                v <<= 64;
                std::uint64_t chunk = next();
                Int c;
                mpz_import(c.get_mpz_t(), 1, 1, sizeof(chunk), 0, 0, &chunk);
                v |= c;
            }
            v >>= (64 * words - bits);
            if (v < n) return v;
        }
    }

    // Signed uniform over [-b, b].
    Int symmetric(const Int& b) { return below_int(2 * b + 1) - b; }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  private:
    RngStream(std::uint64_t mixed, bool) : eng_(mixed), seed_mix_(mixed) {}

    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer.
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
    std::uint64_t seed_mix_ = 0;
};

}  // namespace latsnf
