#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nanoesn {

using Rng = std::mt19937_64;

/// SplitMix64 output function (Steele, Lea & Flood). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based split: the seed of the stream addressed by `path` under
/// `master`. Streams with different paths are statistically independent, and
/// a stream's seed never depends on which other streams exist.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = mix64(master);
    for (std::uint64_t p : path)
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// Purpose tags for sub-streams derived from a single trial seed.
enum class Stream : std::uint64_t {
    Network = 1,
    ReadoutMask,
    TrainInputs,
    TestInputs,
    Noise,
    Fault,
    InitialState,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream s) noexcept
{
    return derive_seed(master, {static_cast<std::uint64_t>(s)});
}

} // namespace nanoesn
