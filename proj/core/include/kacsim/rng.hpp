// Deterministic RNG substreams.  A master seed is split into independent
// streams keyed by (stage id, replica index) so that replica-parallel runs
// produce identical output regardless of scheduling.
#pragma once

#include <cstdint>
#include <random>

namespace kacsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a child seed from (seed, tag); used to keep independent stages on
// disjoint streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}

using Rng = std::mt19937_64;

// Counter-based stream derivation: hash-mix the key triple, then seed the
// engine from the mixed words.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stage_id,
                       std::uint64_t replica = 0) {
    std::uint64_t h = splitmix64(master_seed ^ splitmix64(stage_id));
    h = splitmix64(h ^ splitmix64(replica + 0x51ed2701ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(stage_id), static_cast<std::uint32_t>(replica)};
    return Rng(seq);
}

inline double uniform01(Rng& rng) {
    // 53-bit mantissa uniform in [0,1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double normal01(Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    return n01(rng);
}

}  // namespace kacsim
