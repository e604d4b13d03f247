#ifndef CHARTKIT_SCREENING_HPP
#define CHARTKIT_SCREENING_HPP

#include <cstdint>
#include <vector>

#include "chartkit/audio.hpp"
#include "chartkit/manifest.hpp"

namespace chartkit {

inline constexpr double kScreenThreshold = 0.018;
inline constexpr double kScreenWindowSeconds = 1.0;
inline constexpr double kScreenHopSeconds = 0.5;

// Median of 1 s-window RMS (0.5 s hop) over the stem after mix
// normalisation. Throws Error if the stem is shorter than one window.
double envelope_statistic(const AudioBuffer& stem, const MixStats& mix_stats);

struct ScreenResult {
    bool passed = false;
    double statistic = 0.0;
};

// passed iff statistic >= threshold (boundary inclusive).
ScreenResult screen_stem(const AudioBuffer& stem, const MixStats& mix_stats,
    double threshold = kScreenThreshold);

// splitmix64: deterministic 64-bit generator used for benchmark sampling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed)
        : m_state(seed)
    {
    }

    std::uint64_t next()
    {
        m_state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = m_state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, bound) by rejection sampling (no modulo bias).
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t m_state;
};

// Draws `count` entries from the passers without replacement, uniformly at
// random, skipping draws that would push a genre over `genre_cap` (the cap
// is enforced greedily in draw order). The pool is sorted by song_id before
// drawing, so the result depends only on the entry set and the seed; output
// is sorted by song_id. Throws Error, naming the binding genres, when the
// cap makes `count` unreachable.
std::vector<ManifestEntry> sample_benchmark(const std::vector<ManifestEntry>& passers,
    std::size_t count, std::size_t genre_cap, std::uint64_t seed);

}

#endif
