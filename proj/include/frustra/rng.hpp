#pragma once

#include <cstdint>
#include <cmath>

// Deterministic random number generation. We deliberately avoid
// std::normal_distribution and friends: their output sequences are
// implementation-defined, and every artifact this library emits must be
// reproducible from a 64-bit seed alone.

namespace frustra {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// xoshiro256** seeded via splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            s = splitmix64(s);
            word = s;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bool() { return (next_u64() >> 63) != 0; }

    /// Uniform integer in [0, bound), bound > 0. Rejection-free Lemire-style
    /// reduction would bias determinism tests across word sizes; plain
    /// modulo of a 64-bit draw is fine at the bounds used here.
    std::uint64_t next_below(std::uint64_t bound) {
        return next_u64() % bound;
    }

    /// Standard normal via the polar (Marsaglia) method. Uses only sqrt/log,
    /// consumes a data-dependent but seed-determined number of draws.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int r) {
        return (x << r) | (x >> (64 - r));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Per-trial seed derivation: master seed and (stream, index) are folded
/// through two splitmix64 rounds. Fixed for the lifetime of the file formats,
/// so parallel execution order can never change a trial's input.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t h = splitmix64(master ^ (0xA24BAED4963EE407ULL * (stream + 1)));
    return splitmix64(h ^ (0x9FB21C651E98DF25ULL * (index + 1)));
}

} // namespace frustra
