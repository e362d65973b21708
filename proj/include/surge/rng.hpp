#pragma once

#include <cmath>
#include <cstdint>

namespace surge {

// Counter-based RNG: every draw is a pure function of (seed, stream, counter),
// so samples can be generated in any order or on any thread and still agree
// with a sequential run.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

// uniform in (0,1]; never returns 0 so log() is safe
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t bits = key(seed, stream, counter);
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// standard normal via Box-Muller; each counter yields one deviate
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = uniform(seed, stream, 2 * counter);
    const double u2 = uniform(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

} // namespace rng
} // namespace surge
