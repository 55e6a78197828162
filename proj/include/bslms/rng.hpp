#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bslms {

/// Stream tags used when deriving per-item seeds from a master seed.
enum class Stream : std::uint64_t { System = 1, Trial = 2, Oracle = 3 };

/// Derive a seed from (master, stream, indices) so that item i of a batch is
/// reproducible independently of batch order and thread schedule.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::initializer_list<std::uint64_t> indices) {
    // splitmix64 finalizer applied to a running combination
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(master ^ mix(static_cast<std::uint64_t>(stream)));
    for (auto i : indices) h = mix(h ^ mix(i));
    return h;
}

using Engine = std::mt19937_64;

}  // namespace bslms
