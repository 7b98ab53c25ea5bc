#include "deforsc/util/rng.hpp"

#include <cmath>

namespace deforsc {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    // Mix seed and stream through two splitmix rounds so adjacent streams are
    // decorrelated even for small seeds.
    std::uint64_t s = splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
    return std::mt19937_64(s);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    // Rejection sampling for an unbiased draw.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

double normal(std::mt19937_64& rng) {
    // Box-Muller; u1 is kept away from zero to avoid log(0).
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) {
        double u = uniform01(rng);
        if (u <= 0.0) u = 0x1.0p-53;
        x = -std::log(u);
        total += x;
    }
    for (auto& x : w) x /= total;
    return w;
}

}  // namespace deforsc
