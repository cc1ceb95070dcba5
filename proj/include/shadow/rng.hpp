#pragma once
// Deterministic RNG with a fixed bit-level contract. std:: distributions are
// implementation-defined, which would break byte-identical dataset regeneration
// across toolchains, so the draws are hand-rolled.

#include <cmath>
#include <cstdint>

namespace shadow {

class Rng {
public:
    explicit Rng(uint64_t seed) {
        // splitmix64 expansion of the seed into xoshiro256++ state
        uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ull;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            w = z ^ (z >> 31);
        }
    }

    uint64_t next_u64() {
        auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one value per call, no caching).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Poisson draw. Knuth's product method per unit of the mean; additivity
    /// keeps the per-step exponential out of the underflow range for large λ.
    int poisson(double lambda) {
        int total = 0;
        while (lambda > 0.0) {
            double chunk = lambda > 16.0 ? 16.0 : lambda;
            lambda -= chunk;
            double limit = std::exp(-chunk);
            double p = 1.0;
            int k = -1;
            do {
                ++k;
                p *= uniform();
            } while (p > limit);
            total += k;
        }
        return total;
    }

private:
    uint64_t s_[4];
};

}  // namespace shadow
