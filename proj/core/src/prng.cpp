#include "cgl/prng.hpp"

#include <stdexcept>

namespace cgl {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Prng::Prng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t Prng::next_u64() {
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

double Prng::next_f64() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Prng::next_f64_open_closed() { return 1.0 - next_f64(); }

std::uint64_t Prng::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be >= 1");
    const std::uint64_t threshold = (0ULL - n) % n;  // reject to remove modulo bias
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

Prng Prng::fork(std::uint64_t stream_id) {
    std::uint64_t mix = next_u64() ^ (stream_id * 0x9E3779B97F4A7C15ULL + 0x193A6754ULL);
    return Prng(mix);
}

DenseMatrix sample_uniform_open_closed(Prng& rng, std::size_t len) {
    if (len == 0) throw std::invalid_argument("sample_uniform_open_closed: len must be >= 1");
    DenseMatrix out(1, len);
    for (std::size_t j = 0; j < len; ++j) out(0, j) = rng.next_f64_open_closed();
    return out;
}

std::vector<std::size_t> sample_permutation(Prng& rng, std::size_t n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.next_below(i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace cgl
