#pragma once

#include <array>
#include <cstdint>

#include "cgl/dense.hpp"

namespace cgl {

/// Deterministic xoshiro256++ generator seeded through splitmix64.
///
/// The same seed always yields the same stream, which is what every
/// reproducibility guarantee in this project rests on. Not suitable for
/// cryptography.
class Prng {
public:
    explicit Prng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double next_f64();

    /// Uniform in (0, 1]: strictly positive.
    double next_f64_open_closed();

    /// Uniform integer in [0, n), n >= 1. Rejection sampling, bias-free.
    std::uint64_t next_below(std::uint64_t n);

    /// Derives an independently-seeded child stream.
    Prng fork(std::uint64_t stream_id);

private:
    std::array<std::uint64_t, 4> state_;
};

/// 1 x len row of draws from (0, 1].
DenseMatrix sample_uniform_open_closed(Prng& rng, std::size_t len);

/// Uniform random permutation of {0, ..., n-1} (Fisher-Yates).
std::vector<std::size_t> sample_permutation(Prng& rng, std::size_t n);

}  // namespace cgl
