#ifndef CHARTKIT_ABLATION_HPP
#define CHARTKIT_ABLATION_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "chartkit/model.hpp"

namespace chartkit {

enum class WilcoxonMode { Auto, Exact, Normal };

struct WilcoxonResult {
    double p_value = 1.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t n_used = 0;   // deltas remaining after dropping zeros
    bool exact = false;
    bool degenerate = false;  // every delta was zero
};

// Two-sided paired Wilcoxon signed-rank test. Deltas with |d| < 1e-12 are
// dropped; |d| ranks use average ranks on ties; the statistic is
// min(W+, W-). Exact mode counts sign assignments with min(W+, W-) <= the
// observed value over all 2^n of them (computed by a rank-sum counting DP);
// normal mode uses the tie-corrected normal approximation without
// continuity correction. Auto picks exact for n <= 20. All-zero input
// returns p = 1.0 with the degenerate flag set.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& deltas,
    WilcoxonMode mode = WilcoxonMode::Auto);

// Events that differ between two streams of one song: both sides are greedy
// matched (equal label required, |dt| <= tolerance, evaluation matching
// discipline) and the result is |a| + |b| - 2 * matched. The match count is
// the larger of the two scan orientations, making the diff symmetric.
std::size_t event_diff(const std::vector<TimedEvent>& a, const std::vector<TimedEvent>& b,
    double tolerance = 0.02);

struct SongRun {
    std::string song_id;
    double f1 = 0.0;
    std::vector<TimedEvent> drum_events;
};

struct AblationReport {
    std::string component;
    double delta_f1_mean = 0.0;   // mean over songs of (ablated - full)
    double p_value = 1.0;
    bool degenerate = false;
    std::size_t better = 0;       // songs where the ablated variant won
    std::size_t worse = 0;
    std::size_t ties = 0;         // |delta| < 1e-9
    std::size_t events_changed = 0;
    std::size_t songs = 0;
    std::vector<double> per_song_delta;
};

// Pairs runs by song_id (throws Error if the two sets differ), computes
// per-song F1 deltas, better/worse/tie counts, the Wilcoxon p-value over the
// deltas, and the summed 20 ms event diff between the drum streams.
AblationReport ablation_report(const std::vector<SongRun>& full,
    const std::vector<SongRun>& ablated, const std::string& component);

}

#endif
