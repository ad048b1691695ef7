#include "dispectral/rng.hpp"

#include "dispectral/errors.hpp"

#include <cmath>

namespace dispectral {

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

std::uint64_t CounterRng::hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix(mix(a + 0x9E3779B97F4A7C15ull) ^ (b + 0x2545F4914F6CDD1Dull));
}

std::uint64_t CounterRng::uniform_below(std::uint64_t n) {
    if (n == 0) throw validation_error("uniform_below: n must be positive");
    std::uint64_t threshold = (~n + 1) % n; // 2^64 mod n
    for (;;) {
        std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double CounterRng::normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double CounterRng::poisson(double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw validation_error("poisson: lambda must be finite and nonnegative");
    if (lambda == 0.0) return 0.0;
    if (lambda < 30.0) {
        // Knuth: count uniforms until their product drops below exp(-lambda).
        double limit = std::exp(-lambda);
        double prod = 1.0;
        double k = -1.0;
        do {
            prod *= uniform01();
            k += 1.0;
        } while (prod > limit);
        return k;
    }
    if (lambda > 1e12) {
        double v = std::round(normal(lambda, std::sqrt(lambda)));
        return v < 0.0 ? 0.0 : v;
    }
    // PTRS (Hormann 1993).
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        double u = uniform01() - 0.5;
        double v = uniform01();
        double us = 0.5 - std::fabs(u);
        double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return k;
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            k * log_lambda - lambda - std::lgamma(k + 1.0))
            return k;
    }
}

std::uint64_t CounterRng::binomial(std::uint64_t n, double p) {
    if (p < 0.0 || p > 1.0) throw validation_error("binomial: p must lie in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    // Geometric skips: the gap to the next success is 1 + floor(log U / log(1-p)).
    const double log_q = std::log1p(-p);
    std::uint64_t successes = 0;
    double pos = 0.0;
    const double nn = static_cast<double>(n);
    for (;;) {
        double u = uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        pos += std::floor(std::log(u) / log_q) + 1.0;
        if (pos > nn) return successes;
        ++successes;
    }
}

} // namespace dispectral
