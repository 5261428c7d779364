#pragma once

#include <cstdint>
#include <random>

namespace grnlab {

/// Every random draw in the library goes through this engine type.
using Rng = std::mt19937_64;

/// One round of the splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of trial `trial` in a treatment seeded with `seed`:
/// splitmix64(seed ^ splitmix64(trial)).
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial)
{
    return splitmix64(seed ^ splitmix64(trial));
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace grnlab
