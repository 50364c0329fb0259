#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace glfit {

/// splitmix64: used only to expand a single seed into generator state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256++: fast 256-bit shift-register-style generator with
/// well-understood statistical quality. Deterministic for a given seed.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
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
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1).
    double uniform_open() {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return u;
    }

    /// Standard normal via the Marsaglia polar method (caches the spare deviate).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang; shapes below 1 use the boost
    /// Gamma(shape) = Gamma(shape + 1) * U^(1/shape).
    double gamma(double shape) {
        if (!(shape > 0.0))
            throw std::domain_error("Xoshiro256pp::gamma: shape must be positive");
        if (shape < 1.0)
            return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t w, int k) { return (w << k) | (w >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace glfit
