#pragma once

#include <cstdint>
#include <random>

namespace rrg {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for replica `stream` under `master`; a replica can be regenerated in
// isolation from (master, stream) alone.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
    return Rng(stream_seed(master, stream));
}

inline double exponential(Rng& rng, double rate) {
    return std::exponential_distribution<double>(rate)(rng);
}

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

}  // namespace rrg
