#pragma once

// Portable seeded random streams.
//
// Bits come from xoshiro256** (Blackman and Vigna) with its state expanded
// from the seed by SplitMix64. The standard library's distributions are
// implementation-defined, so the conversions to uniform and Gaussian
// variates are done here as well. Seeding is cheap, so one stream per trial
// or frame costs nothing.

#include <array>
#include <cmath>
#include <cstdint>

namespace lime {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `index` under `root`, e.g. one per trial or frame.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return mix_seed(mix_seed(root) ^ mix_seed(index + 0x632BE59BD9B4E019ULL));
}

class Rng {
public:
    static constexpr const char* kAlgorithm = "xoshiro256**/splitmix64/box-muller";

    explicit Rng(std::uint64_t seed) {
        // Successive SplitMix64 outputs; never all zero.
        for (auto& word : state_) {
            word = mix_seed(seed);
            seed += 0x9E3779B97F4A7C15ULL;
        }
    }

    /// Stream starting from a raw xoshiro256** state (must not be all zero).
    static Rng from_state(const std::array<std::uint64_t, 4>& state) {
        Rng rng(0);
        rng.state_ = state;
        return rng;
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

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via the Box-Muller transform; the second variate of
    /// each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // 1 - uniform() lies in (0, 1], so the log is finite.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Exponential with the given mean; a zero mean yields 0.
    double exponential(double mean) {
        if (mean <= 0.0) return 0.0;
        return -mean * std::log(1.0 - uniform());
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lime
