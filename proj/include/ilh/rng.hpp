#pragma once

#include <cstdint>
#include <random>

namespace ilh {

// Every randomized stage draws from its own derived stream so that results
// are independent of worker scheduling. Streams are named by small constants
// mixed into a per-bit seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over seed advanced by salt.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t bit_seed(std::uint64_t master_seed, std::uint32_t bit_index) {
    return mix_seed(master_seed, 0x10000000ULL + bit_index);
}

// Per-bit sub-stream names.
enum class Stream : std::uint64_t {
    subset = 1,    // training-point sampling
    features = 2,  // feature-subset sampling
    init = 3,      // initial code assignment
    mincut = 4,    // group partition + sweep order
    svm = 5,       // epoch shuffles
    centers = 6,   // kernel center choice + sigma sampling
    retry = 7,     // re-init after a degenerate optimum
};

inline std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
    return mix_seed(seed, static_cast<std::uint64_t>(s));
}

// Cut-stream seed for round `t` of an alternating scheme. Round 0 matches
// what single-round training uses, which keeps the coupled baseline's first
// iteration aligned with independent bit training.
inline std::uint64_t mincut_round_seed(std::uint64_t seed, std::uint32_t round) {
    return mix_seed(stream_seed(seed, Stream::mincut), round);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace ilh
