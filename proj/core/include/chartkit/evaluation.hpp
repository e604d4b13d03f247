#ifndef CHARTKIT_EVALUATION_HPP
#define CHARTKIT_EVALUATION_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "chartkit/model.hpp"

namespace chartkit {

struct MatchPair {
    std::size_t gt_index = 0;
    std::size_t pred_index = 0;
    double signed_offset = 0.0;  // prediction time minus ground-truth time
};

struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<std::size_t> unmatched_gt;
    std::vector<std::size_t> unmatched_pred;
};

// Onset matching: ground-truth events are visited in ascending time order
// and each takes the nearest still-unmatched prediction within +-tolerance;
// equal distances resolve to the earlier prediction. Inputs must be sorted
// by time (Track::normalized order); throws Error otherwise.
MatchResult greedy_match(const std::vector<TimedEvent>& gt,
    const std::vector<TimedEvent>& pred, double tolerance);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Both sides empty -> (1, 1, 1); exactly one side empty -> (0, 0, 0).
Prf prf_from_match(std::size_t gt_count, std::size_t pred_count, std::size_t matched);

// Square confusion over lane codes (drums: pad index with the cymbal flag
// ignored; fretted: fret; vocals: semitone). rows = ground truth lane,
// columns = predicted lane; counts sum to the number of matched pairs.
struct LaneConfusion {
    std::vector<int> lane_codes;
    std::vector<std::vector<std::size_t>> counts;
};

struct LaneStats {
    double accuracy = 0.0;  // fraction of matched pairs with equal lane code
    LaneConfusion confusion;
};

LaneStats lane_stats(Instrument instrument, const std::vector<TimedEvent>& gt,
    const std::vector<TimedEvent>& pred, const MatchResult& match);

struct EvalResult {
    Prf prf;
    double lane_accuracy = 0.0;
    LaneConfusion confusion;
    double best_offset = 0.0;
    std::size_t gt_count = 0;
    std::size_t pred_count = 0;
    std::size_t matched = 0;
};

struct OffsetSearchResult {
    double best_offset = 0.0;
    std::map<Instrument, EvalResult> per_instrument;
};

// Scans a global prediction-time offset over [-range, +range] on a `step`
// grid, keeping the offset that maximises drums F1; among equal-F1 offsets
// the smallest mean absolute matched drum offset wins, then the smaller
// |offset|, then the smaller signed offset. All instruments are re-evaluated
// at the winning offset. Throws Error if either chart lacks a drums track.
OffsetSearchResult offset_search(const Chart& gt, const Chart& pred, double tolerance,
    double range = 0.2, double step = 0.01);

struct CeilingResult {
    double fraction_within = 0.0;
    std::vector<std::size_t> histogram;   // 10 ms bins spanning [-0.2, 0.2]
    std::vector<double> bin_centers;
    std::size_t gt_count = 0;
};

// For each ground-truth time, the signed offset to the nearest onset peak
// (gt minus peak); fraction_within counts |offset| <= tolerance. Offsets
// beyond +-0.2 s (including events with no peak at all) land in the edge
// bins.
CeilingResult gt_ceiling(const std::vector<double>& gt_times,
    const std::vector<double>& peak_times, double tolerance);

// Loads the entry's ground-truth chart from gt_chart_path (resolved against
// audio_root when relative) and runs offset_search against the predictions.
OffsetSearchResult evaluate_song(const std::string& gt_chart_path, const Chart& pred,
    double tolerance = 0.1);

}

#endif
