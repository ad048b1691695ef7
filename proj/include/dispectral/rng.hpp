#pragma once

#include <cstdint>

namespace dispectral {

// Counter-based 64-bit generator. The state is a (key, counter) pair and
// every output is the SplitMix64 finalizer applied to the pair, so any
// number of independent streams can be derived from a master seed and a
// stream index without coordination. All sampling routines are fully
// deterministic given the construction seed.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(mix(seed)) {}

    // Stable 64-bit hash of (a, b); used everywhere a per-run or per-task
    // seed is derived from a master seed.
    static std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

    static CounterRng derived(std::uint64_t master, std::uint64_t stream) {
        return CounterRng(hash_combine(master, stream));
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer on [0, n) (Lemire rejection).
    std::uint64_t uniform_below(std::uint64_t n);

    // Standard normal via Box-Muller (no cached spare, keeps the stream
    // position a pure function of the call count).
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Exact Poisson for any lambda >= 0: Knuth product method for small
    // means, Hormann's PTRS transformed rejection for moderate ones and a
    // rounded normal above 1e12 where the relative CLT error is ~1e-6 of
    // one standard deviation.
    double poisson(double lambda);

    // Exact Binomial(n, p) by geometric waiting times, O(successes).
    std::uint64_t binomial(std::uint64_t n, double p);

private:
    static std::uint64_t mix(std::uint64_t z);

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace dispectral
