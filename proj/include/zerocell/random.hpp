#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace zerocell {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// seed of the k-th sample of a run seeded with `seed`
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(k + 0x632be59bd9b4e019ULL));
}

// uniform point on the unit sphere S^{d-1}
inline void random_direction(Rng& rng, std::span<double> out)
{
    std::normal_distribution<double> g;
    for (;;) {
        double s = 0.0;
        for (auto& x : out) {
            x = g(rng);
            s += x * x;
        }
        if (s > 1e-300) {
            const double inv = 1.0 / std::sqrt(s);
            for (auto& x : out) x *= inv;
            return;
        }
    }
}

inline std::vector<double> random_direction(Rng& rng, int d)
{
    std::vector<double> u(d);
    random_direction(rng, u);
    return u;
}

} // namespace zerocell
