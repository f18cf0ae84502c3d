#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sirsim {

// Deterministic random stream built on xoshiro256++ with splitmix64 seeding.
// The generator is fully specified here (no standard-library distributions),
// so a given seed produces the same variate sequence on every platform.
// Substreams are derived by hashing (master seed, index pair), which keeps
// replications reproducible independent of scheduling order.
class RngStream {
  public:
    explicit RngStream(uint64_t seed) {
        uint64_t z = seed;
        for (auto& word : state_) word = splitmix64(z);
    }

    // Counter-based substream: stream for replication (a, b) under a master
    // seed. Distinct index pairs give statistically independent streams.
    static RngStream derive(uint64_t master_seed, uint64_t a, uint64_t b) {
        uint64_t z = master_seed;
        uint64_t h = splitmix64(z);
        z = h ^ (0x9E3779B97F4A7C15ULL * (a + 1));
        h = splitmix64(z);
        z = h ^ (0xC2B2AE3D27D4EB4FULL * (b + 1));
        return RngStream(splitmix64(z));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on the open interval (0, 1); safe to pass to log().
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    // Strictly positive exponential variate with the given rate.
    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Poisson variate: sequential inversion for small means, Hormann's
    // transformed rejection (PTRS) for large ones. No normal approximation.
    uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 10.0) return poisson_inversion(mean);
        return poisson_ptrs(mean);
    }

  private:
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t poisson_inversion(double mean) {
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        uint64_t k = 0;
        while (u > cdf && k < 2000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    uint64_t poisson_ptrs(double mean) {
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            double u = uniform() - 0.5;
            double v = uniform();
            double us = 0.5 - std::fabs(u);
            double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            double k = kf;
            double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
            double rhs = k * log_mean - mean - std::lgamma(k + 1.0);
            if (lhs <= rhs) return static_cast<uint64_t>(kf);
        }
    }

    std::array<uint64_t, 4> state_;
};

}  // namespace sirsim
