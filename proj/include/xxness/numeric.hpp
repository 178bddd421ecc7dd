// numeric.hpp — Scalar kernels (Bose factors, stable sinh ratios), counter-based
// uniform draws, and a small deterministic parallel-for.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "xxness/errors.hpp"

namespace xxness {

// Arguments beyond this go through the log-space branches of the sinh ratios.
inline constexpr double kLogSpaceThreshold = 30.0;

// Bose occupation n(beta, E) = 1/(exp(beta*E) - 1), E > 0.
inline double bose_occupation(double beta, double energy) {
    if (!(beta > 0.0))
        throw DomainError("bose_occupation: beta must be positive");
    if (!(energy > 0.0))
        throw DomainError("bose_occupation: energy must be positive");
    const double x = beta * energy;
    if (x > 709.0) return std::exp(-x); // expm1 would overflow; relative error ~e^{-x}
    return 1.0 / std::expm1(x);
}

// sinh(a)/sinh(b) for b > 0 and any sign of a, safe for |a|, b up to ~1e4.
inline double sinh_ratio(double a, double b) {
    if (!(b > 0.0)) throw DomainError("sinh_ratio: denominator argument must be positive");
    const double sign = (a < 0.0) ? -1.0 : 1.0;
    const double aa = std::abs(a);
    if (aa < kLogSpaceThreshold && b < kLogSpaceThreshold) {
        if (a == 0.0) return 0.0;
        return std::sinh(a) / std::sinh(b);
    }
    // sinh(a)/sinh(b) = e^{a-b} (1 - e^{-2a}) / (1 - e^{-2b})
    const double num = -std::expm1(-2.0 * aa);
    const double den = -std::expm1(-2.0 * b);
    return sign * std::exp(aa - b) * num / den;
}

// sinh(c*E) / sqrt(sinh(b0*E) * sinh(bN*E)) for b0, bN > 0.
inline double sinh_sqrt_ratio(double c, double b0, double bN, double energy) {
    if (!(b0 > 0.0) || !(bN > 0.0))
        throw DomainError("sinh_sqrt_ratio: inverse temperatures must be positive");
    const double sign = (c < 0.0) ? -1.0 : 1.0;
    const double cc = std::abs(c);
    const double num = -std::expm1(-2.0 * cc * energy);
    const double d0 = -std::expm1(-2.0 * b0 * energy);
    const double dN = -std::expm1(-2.0 * bN * energy);
    return sign * std::exp((cc - 0.5 * (b0 + bN)) * energy) * num / std::sqrt(d0 * dN);
}

inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// --- counter-based uniform draws ----------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stateless key derivation: same (base, a, b) always maps to the same stream key.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = splitmix64(base);
    s = splitmix64(s ^ (a + 0x9e3779b97f4a7c15ULL));
    s = splitmix64(s ^ (b + 0xbf58476d1ce4e5b9ULL));
    return s;
}

// Uniform draw in [0,1) keyed by (seed, index); order-independent.
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t bits = splitmix64(seed ^ splitmix64(index + 1));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// --- deterministic parallel for ------------------------------------------------

// Runs fn(i) for i in [0, n); results must be written to per-index slots so the
// outcome is independent of scheduling. threads == 0 picks the hardware count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace xxness
