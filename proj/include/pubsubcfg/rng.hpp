/*
 * OPC UA PubSub configuration toolkit: deterministic random draws.
 *
 * Copyright (c) 2026 the pubsubcfg authors
 *
 * Released under the Apache 2.0 Licence
 */
#ifndef PUBSUBCFG_RNG_HPP
#define PUBSUBCFG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pubsubcfg {

/// splitmix64 finalizer. Used as a counter-based generator: hashing
/// (seed, coordinates) gives independent draws that do not depend on how
/// many draws other parts of a run consumed, which keeps paired-seed
/// comparisons paired.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from 64 random bits.
constexpr double to_unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform [0,1) draw at a (seed, a, b, c) coordinate.
inline double hash_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                        std::uint64_t c = 0) {
    std::uint64_t x = seed;
    x = splitmix64(x ^ (a * 0xd6e8feb86659fd93ull));
    x = splitmix64(x ^ (b * 0xa3b195354a39b70dull));
    x = splitmix64(x ^ (c * 0x1b03738712fad5c9ull));
    return to_unit_interval(x);
}

/// Bernoulli draw at a coordinate.
inline bool hash_bernoulli(double p, std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                           std::uint64_t c = 0) {
    return hash_unit(seed, a, b, c) < p;
}

/// Sequential generator for arrival streams (xorshift-multiply core).
class SequentialRng {
public:
    explicit SequentialRng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dull)) {
        if (state_ == 0) state_ = 1;
    }

    std::uint64_t next_bits() {
        state_ = splitmix64(state_);
        return state_;
    }

    double uniform() { return to_unit_interval(next_bits()); }

    /// Exponential with the given mean (> 0).
    double exponential(double mean) {
        double u = uniform();
        // log1p(-u) is finite because u < 1
        return -mean * std::log1p(-u);
    }

private:
    std::uint64_t state_;
};

} // namespace pubsubcfg

#endif
