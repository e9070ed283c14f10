#pragma once

#include <cstdint>
#include <random>

namespace gesn {

// All randomness flows through std::mt19937_64 (a fully specified 64-bit
// generator). The standard distributions are implementation-defined, so
// the conversions to doubles below are done by hand to keep draws
// identical across standard libraries.

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of trial `init_index` on split `split_id`:
/// mix64(mix64(mix64(master) ^ split_id) ^ init_index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t split_id, std::uint64_t init_index) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (one draw per call, second value discarded).
    double normal();

    /// Uniform integer in [0, n), rejection sampled.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

} // namespace gesn
