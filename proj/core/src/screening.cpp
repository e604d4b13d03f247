#include "chartkit/screening.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "chartkit/errors.hpp"

namespace chartkit {

double envelope_statistic(const AudioBuffer& stem, const MixStats& mix_stats)
{
    const auto normalized = normalize_by_mix(stem, mix_stats);
    const auto windows = windowed_rms(normalized, kScreenWindowSeconds, kScreenHopSeconds);
    if (windows.empty()) {
        throw Error("stem is shorter than one screening window");
    }
    std::vector<double> values;
    values.reserve(windows.size());
    for (const auto& window : windows) {
        values.push_back(window.rms);
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) {
        return values[mid];
    }
    return 0.5 * (values[mid - 1] + values[mid]);
}

ScreenResult screen_stem(const AudioBuffer& stem, const MixStats& mix_stats,
    double threshold)
{
    const double statistic = envelope_statistic(stem, mix_stats);
    return ScreenResult { statistic >= threshold, statistic };
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound)
{
    if (bound == 0) {
        throw Error("bound must be positive");
    }
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    while (true) {
        const std::uint64_t draw = next();
        if (draw < limit) {
            return draw % bound;
        }
    }
}

std::vector<ManifestEntry> sample_benchmark(const std::vector<ManifestEntry>& passers,
    std::size_t count, std::size_t genre_cap, std::uint64_t seed)
{
    std::vector<ManifestEntry> pool = passers;
    std::sort(pool.begin(), pool.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
        return a.song_id < b.song_id;
    });
    for (std::size_t i = 1; i < pool.size(); ++i) {
        if (pool[i].song_id == pool[i - 1].song_id) {
            throw Error("duplicate song_id in sampling pool: " + pool[i].song_id);
        }
    }

    std::map<std::string, std::size_t> genre_totals;
    for (const auto& entry : pool) {
        genre_totals[entry.genre] += 1;
    }
    std::size_t feasible = 0;
    for (const auto& [genre, total] : genre_totals) {
        feasible += std::min(total, genre_cap);
    }
    if (count > feasible) {
        std::string binding;
        for (const auto& [genre, total] : genre_totals) {
            if (total > genre_cap) {
                if (!binding.empty()) {
                    binding += ", ";
                }
                binding += genre;
            }
        }
        throw Error("cannot sample " + std::to_string(count) + " songs: cap "
            + std::to_string(genre_cap) + " per genre limits the pool to "
            + std::to_string(feasible) + " (binding genres: "
            + (binding.empty() ? "none" : binding) + ")");
    }

    SplitMix64 rng(seed);
    std::vector<bool> chosen(pool.size(), false);
    std::map<std::string, std::size_t> genre_counts;
    std::size_t picked = 0;
    while (picked < count) {
        const auto index = static_cast<std::size_t>(rng.next_below(pool.size()));
        if (chosen[index]) {
            continue;
        }
        if (genre_counts[pool[index].genre] >= genre_cap) {
            continue;
        }
        chosen[index] = true;
        genre_counts[pool[index].genre] += 1;
        ++picked;
    }

    std::vector<ManifestEntry> result;
    result.reserve(count);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (chosen[i]) {
            result.push_back(pool[i]);
        }
    }
    return result;
}

}
