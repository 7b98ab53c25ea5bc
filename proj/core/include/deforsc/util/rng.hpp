// Deterministic random-number utilities. Every stochastic routine in the
// library derives an independent stream from (seed, stream_id) so results are
// bit-reproducible regardless of how work is ordered or parallelised.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace deforsc {

// splitmix64: fast, well-mixed 64-bit hash used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Independent generator for substream `stream` of master seed `seed`.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) with 53 random bits. We sidestep
// std::uniform_real_distribution so the exact draw sequence is pinned down by
// this code, not by the standard library implementation.
double uniform01(std::mt19937_64& rng);

// Uniform double in [lo, hi).
double uniform(std::mt19937_64& rng, double lo, double hi);

// Uniform integer in [0, n). n must be > 0.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

// Standard normal via Box-Muller (no cached spare: two uniforms per call, so
// the stream position is predictable).
double normal(std::mt19937_64& rng);

// Random point on the unit simplex (normalised exponentials).
std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n);

// In-place Fisher-Yates shuffle using uniform_index (implementation-pinned).
template <typename T>
void shuffle(std::mt19937_64& rng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace deforsc
