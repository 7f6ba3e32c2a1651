#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "regionlab/error.hpp"

namespace regionlab {

/// Deterministic random number generation.
///
/// All stochastic results in the library (permutation references, MCMC
/// chains, synthetic data) are reproducible bit-exactly from a seed, on any
/// platform and with any worker count. Two pieces make that possible:
///
///  * the generator is xoshiro256** seeded through splitmix64, so the
///    stream depends only on the 64-bit seed, never on std:: distribution
///    internals (which the standard leaves unspecified);
///  * independent tasks (permutation i, chain c, unit u) each draw from
///    their own stream, derived from (master seed, stream id) by counter.
///    Work can then be scheduled across any number of threads without
///    changing a single draw.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    /// Stream `stream` of the generator family identified by `seed`.
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t mix = seed ^ (0xD2B74407B1CE6E93ULL * (stream + 1));
        for (auto& word : state_)
            word = splitmix64(mix);
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

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1); never returns an exact endpoint.
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); unbiased via rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        require(n > 0, "uniform_index: empty range");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold)
                return r % n;
        }
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Laplace(location, scale) via inverse CDF.
    double laplace(double location, double scale) {
        const double u = uniform_open() - 0.5;
        const double sign = u < 0.0 ? -1.0 : 1.0;
        return location - scale * sign * std::log(1.0 - 2.0 * std::fabs(u));
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i)
            std::swap(values[i - 1], values[uniform_index(i)]);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Derives a fresh 64-bit seed for a named pipeline stage, so stages fed by
/// one master seed do not share streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
    std::uint64_t mix = master ^ (0xA0761D6478BD642FULL * (salt + 1));
    return splitmix64(mix);
}

} // namespace regionlab
