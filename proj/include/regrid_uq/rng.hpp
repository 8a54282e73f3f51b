#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "regrid_uq/errors.hpp"

namespace regrid_uq::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer. Counter mode (mix of key + i*kGolden) gives a
// stateless stream: output i depends only on (key, i), never on call order.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Derive a subkey from a key and one path component.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t v) {
    return mix64(key ^ mix64(v + kGolden));
}

// Derive a subkey from a key and a path of components, left to right.
// Used to give every (location, covariate, day, sim, draw) an independent
// stream so any subset of a study can be recomputed in isolation.
constexpr std::uint64_t derive_path(std::uint64_t key, std::initializer_list<std::uint64_t> path) {
    for (std::uint64_t v : path) key = derive(key, v);
    return key;
}

// Deterministic counter-based stream. Identical key -> identical sequence,
// on any thread, regardless of what other streams were consumed.
class Stream {
public:
    explicit Stream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the pair partner is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    // Gamma(shape, scale=1) via Marsaglia-Tsang; shape > 0.
    double gamma_draw(double shape) {
        if (!(shape > 0.0)) throw ValidationError("rng: gamma shape must be positive");
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma_draw(shape + 1.0) * std::pow(u > 0.0 ? u : 0x1.0p-53, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Chi-square with dof degrees of freedom.
    double chi_square(double dof) { return 2.0 * gamma_draw(0.5 * dof); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace regrid_uq::rng
