#include "chartkit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "chartkit/errors.hpp"
#include "chartkit/midi.hpp"

namespace chartkit {

namespace {

    void require_sorted(const std::vector<TimedEvent>& events, const char* side)
    {
        for (std::size_t i = 1; i < events.size(); ++i) {
            if (events[i].time < events[i - 1].time) {
                throw Error(std::string(side) + " events must be sorted by time");
            }
        }
    }

    int lane_code(Instrument instrument, Label label)
    {
        if (instrument == Instrument::Drums) {
            return label.value;  // pad index; cymbal flag is not a lane
        }
        return label.value;
    }

}

MatchResult greedy_match(const std::vector<TimedEvent>& gt,
    const std::vector<TimedEvent>& pred, double tolerance)
{
    if (tolerance < 0.0) {
        throw Error("tolerance must be non-negative");
    }
    require_sorted(gt, "ground-truth");
    require_sorted(pred, "prediction");

    MatchResult result;
    std::vector<bool> pred_used(pred.size(), false);
    std::size_t window_low = 0;

    for (std::size_t g = 0; g < gt.size(); ++g) {
        const double t = gt[g].time;
        while (window_low < pred.size() && pred[window_low].time < t - tolerance) {
            ++window_low;
        }
        std::size_t best = pred.size();
        double best_distance = 0.0;
        for (std::size_t p = window_low; p < pred.size() && pred[p].time <= t + tolerance;
             ++p) {
            if (pred_used[p]) {
                continue;
            }
            const double distance = std::abs(pred[p].time - t);
            if (best == pred.size() || distance < best_distance) {
                best = p;
                best_distance = distance;
            }
            // Equal distance keeps the earlier prediction already held.
        }
        if (best != pred.size()) {
            pred_used[best] = true;
            result.pairs.push_back(MatchPair { g, best, pred[best].time - t });
        } else {
            result.unmatched_gt.push_back(g);
        }
    }
    for (std::size_t p = 0; p < pred.size(); ++p) {
        if (!pred_used[p]) {
            result.unmatched_pred.push_back(p);
        }
    }
    return result;
}

Prf prf_from_match(std::size_t gt_count, std::size_t pred_count, std::size_t matched)
{
    if (gt_count == 0 && pred_count == 0) {
        return Prf { 1.0, 1.0, 1.0 };
    }
    if (gt_count == 0 || pred_count == 0) {
        return Prf { 0.0, 0.0, 0.0 };
    }
    const double precision = static_cast<double>(matched) / pred_count;
    const double recall = static_cast<double>(matched) / gt_count;
    const double f1 = (precision + recall) > 0.0
        ? 2.0 * precision * recall / (precision + recall)
        : 0.0;
    return Prf { precision, recall, f1 };
}

LaneStats lane_stats(Instrument instrument, const std::vector<TimedEvent>& gt,
    const std::vector<TimedEvent>& pred, const MatchResult& match)
{
    std::set<int> codes;
    if (instrument != Instrument::Vocals) {
        for (int c = 0; c <= 4; ++c) {
            codes.insert(c);
        }
    }
    for (const auto& pair : match.pairs) {
        codes.insert(lane_code(instrument, gt[pair.gt_index].label));
        codes.insert(lane_code(instrument, pred[pair.pred_index].label));
    }

    LaneStats stats;
    stats.confusion.lane_codes.assign(codes.begin(), codes.end());
    const std::size_t n = stats.confusion.lane_codes.size();
    stats.confusion.counts.assign(n, std::vector<std::size_t>(n, 0));

    auto index_of = [&stats](int code) {
        const auto& v = stats.confusion.lane_codes;
        return static_cast<std::size_t>(
            std::lower_bound(v.begin(), v.end(), code) - v.begin());
    };

    std::size_t equal = 0;
    for (const auto& pair : match.pairs) {
        const int gt_code = lane_code(instrument, gt[pair.gt_index].label);
        const int pred_code = lane_code(instrument, pred[pair.pred_index].label);
        stats.confusion.counts[index_of(gt_code)][index_of(pred_code)] += 1;
        if (gt_code == pred_code) {
            ++equal;
        }
    }
    stats.accuracy = match.pairs.empty()
        ? 0.0
        : static_cast<double>(equal) / match.pairs.size();
    return stats;
}

namespace {

    std::vector<TimedEvent> shifted(const std::vector<TimedEvent>& events, double offset)
    {
        std::vector<TimedEvent> out = events;
        for (auto& event : out) {
            event.time += offset;
        }
        return out;
    }

    EvalResult evaluate_tracks(Instrument instrument, const std::vector<TimedEvent>& gt,
        const std::vector<TimedEvent>& pred, double tolerance, double offset)
    {
        const auto moved = shifted(pred, offset);
        const auto match = greedy_match(gt, moved, tolerance);
        EvalResult result;
        result.prf = prf_from_match(gt.size(), moved.size(), match.pairs.size());
        const auto lanes = lane_stats(instrument, gt, moved, match);
        result.lane_accuracy = lanes.accuracy;
        result.confusion = lanes.confusion;
        result.best_offset = offset;
        result.gt_count = gt.size();
        result.pred_count = moved.size();
        result.matched = match.pairs.size();
        return result;
    }

}

OffsetSearchResult offset_search(const Chart& gt, const Chart& pred, double tolerance,
    double range, double step)
{
    if (!(range > 0.0) || !(step > 0.0)) {
        throw Error("offset range and step must be positive");
    }
    const auto gt_drums = gt.tracks.find(Instrument::Drums);
    const auto pred_drums = pred.tracks.find(Instrument::Drums);
    if (gt_drums == gt.tracks.end() || pred_drums == pred.tracks.end()) {
        throw Error("offset search requires a drums track on both sides");
    }

    const int half_steps = static_cast<int>(std::llround(range / step));
    double best_offset = 0.0;
    double best_f1 = -1.0;
    double best_mean_abs = 0.0;

    for (int k = -half_steps; k <= half_steps; ++k) {
        const double offset = k * step;
        const auto moved = shifted(pred_drums->second.events, offset);
        const auto match = greedy_match(gt_drums->second.events, moved, tolerance);
        const double f1 = prf_from_match(gt_drums->second.events.size(), moved.size(),
            match.pairs.size())
                              .f1;
        double mean_abs = std::numeric_limits<double>::infinity();
        if (!match.pairs.empty()) {
            double total = 0.0;
            for (const auto& pair : match.pairs) {
                total += std::abs(pair.signed_offset);
            }
            mean_abs = total / match.pairs.size();
        }

        bool better = false;
        if (f1 > best_f1) {
            better = true;
        } else if (f1 == best_f1) {
            if (mean_abs < best_mean_abs) {
                better = true;
            } else if (mean_abs == best_mean_abs) {
                if (std::abs(offset) < std::abs(best_offset)
                    || (std::abs(offset) == std::abs(best_offset) && offset < best_offset)) {
                    better = true;
                }
            }
        }
        if (better) {
            best_f1 = f1;
            best_mean_abs = mean_abs;
            best_offset = offset;
        }
    }

    OffsetSearchResult result;
    result.best_offset = best_offset;

    std::set<Instrument> instruments;
    for (const auto& [instrument, track] : gt.tracks) {
        instruments.insert(instrument);
    }
    for (const auto& [instrument, track] : pred.tracks) {
        instruments.insert(instrument);
    }
    static const std::vector<TimedEvent> kEmpty;
    for (Instrument instrument : instruments) {
        const auto gt_it = gt.tracks.find(instrument);
        const auto pred_it = pred.tracks.find(instrument);
        const auto& gt_events = gt_it != gt.tracks.end() ? gt_it->second.events : kEmpty;
        const auto& pred_events
            = pred_it != pred.tracks.end() ? pred_it->second.events : kEmpty;
        result.per_instrument[instrument]
            = evaluate_tracks(instrument, gt_events, pred_events, tolerance, best_offset);
    }
    return result;
}

CeilingResult gt_ceiling(const std::vector<double>& gt_times,
    const std::vector<double>& peak_times, double tolerance)
{
    constexpr double kHistogramRange = 0.2;
    constexpr double kBinWidth = 0.01;
    const int num_bins = static_cast<int>(std::llround(2.0 * kHistogramRange / kBinWidth));

    CeilingResult result;
    result.histogram.assign(num_bins, 0);
    result.bin_centers.resize(num_bins);
    for (int b = 0; b < num_bins; ++b) {
        result.bin_centers[b] = -kHistogramRange + (b + 0.5) * kBinWidth;
    }
    result.gt_count = gt_times.size();
    if (gt_times.empty()) {
        return result;
    }

    std::vector<double> sorted_peaks = peak_times;
    std::sort(sorted_peaks.begin(), sorted_peaks.end());

    std::size_t within = 0;
    for (double t : gt_times) {
        double offset = std::numeric_limits<double>::infinity();
        if (!sorted_peaks.empty()) {
            const auto it = std::lower_bound(sorted_peaks.begin(), sorted_peaks.end(), t);
            if (it != sorted_peaks.end()) {
                offset = t - *it;
            }
            if (it != sorted_peaks.begin()) {
                const double prev_offset = t - *(it - 1);
                if (std::abs(prev_offset) < std::abs(offset)) {
                    offset = prev_offset;
                }
            }
        }
        if (std::abs(offset) <= tolerance) {
            ++within;
        }
        int bin = std::isfinite(offset)
            ? static_cast<int>(std::floor((offset + kHistogramRange) / kBinWidth))
            : num_bins;
        bin = std::clamp(bin, 0, num_bins - 1);
        result.histogram[static_cast<std::size_t>(bin)] += 1;
    }
    result.fraction_within = static_cast<double>(within) / gt_times.size();
    return result;
}

OffsetSearchResult evaluate_song(const std::string& gt_chart_path, const Chart& pred,
    double tolerance)
{
    const auto parsed = parse_chart_midi_file(gt_chart_path);
    return offset_search(parsed.chart, pred, tolerance);
}

}
