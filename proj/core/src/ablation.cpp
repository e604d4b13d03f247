#include "chartkit/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "chartkit/errors.hpp"
#include "chartkit/evaluation.hpp"

namespace chartkit {

namespace {

    constexpr double kZeroDelta = 1e-12;
    constexpr double kTieDelta = 1e-9;

    // Average ranks of |deltas|, doubled so ties stay integral.
    std::vector<long long> doubled_ranks(const std::vector<double>& magnitudes)
    {
        const std::size_t n = magnitudes.size();
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&magnitudes](std::size_t a, std::size_t b) {
            return magnitudes[a] < magnitudes[b];
        });

        std::vector<long long> ranks(n, 0);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) {
                ++j;
            }
            // Positions i..j (0-based) share the average rank
            // ((i+1) + (j+1)) / 2; doubled it is (i + j + 2).
            const long long doubled = static_cast<long long>(i + j + 2);
            for (std::size_t k = i; k <= j; ++k) {
                ranks[order[k]] = doubled;
            }
            i = j + 1;
        }
        return ranks;
    }

    double exact_p_value(const std::vector<long long>& ranks, long long observed_doubled)
    {
        // Distribution of 2*W+ over all sign assignments by convolution.
        long long total = 0;
        for (long long r : ranks) {
            total += r;
        }
        std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
        counts[0] = 1.0;
        long long reach = 0;
        for (long long r : ranks) {
            for (long long v = reach; v >= 0; --v) {
                const double c = counts[static_cast<std::size_t>(v)];
                if (c > 0.0) {
                    counts[static_cast<std::size_t>(v + r)] += c;
                }
            }
            reach += r;
        }

        // min(W+, W-) <= w  <=>  W+ <= w or W+ >= total - w.
        double favorable = 0.0;
        for (long long v = 0; v <= total; ++v) {
            if (v <= observed_doubled || v >= total - observed_doubled) {
                favorable += counts[static_cast<std::size_t>(v)];
            }
        }
        return favorable / std::pow(2.0, static_cast<double>(ranks.size()));
    }

    double normal_p_value(const std::vector<double>& magnitudes, double w_min)
    {
        const double n = static_cast<double>(magnitudes.size());
        const double mean = n * (n + 1.0) / 4.0;

        // Tie correction: subtract sum(t^3 - t) / 48 over tie groups.
        std::vector<double> sorted = magnitudes;
        std::sort(sorted.begin(), sorted.end());
        double tie_term = 0.0;
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) {
                ++j;
            }
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
        const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
        if (variance <= 0.0) {
            return 1.0;
        }
        const double z = (w_min - mean) / std::sqrt(variance);
        return std::erfc(-z / std::sqrt(2.0));
    }

}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& deltas, WilcoxonMode mode)
{
    std::vector<double> magnitudes;
    std::vector<bool> positive;
    for (double d : deltas) {
        if (std::abs(d) < kZeroDelta) {
            continue;
        }
        magnitudes.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }

    WilcoxonResult result;
    result.n_used = magnitudes.size();
    if (magnitudes.empty()) {
        result.degenerate = true;
        result.p_value = 1.0;
        result.exact = true;
        return result;
    }

    const auto ranks = doubled_ranks(magnitudes);
    long long w_plus_doubled = 0;
    long long total_doubled = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        total_doubled += ranks[i];
        if (positive[i]) {
            w_plus_doubled += ranks[i];
        }
    }
    const long long w_minus_doubled = total_doubled - w_plus_doubled;
    result.w_plus = w_plus_doubled / 2.0;
    result.w_minus = w_minus_doubled / 2.0;
    const long long observed = std::min(w_plus_doubled, w_minus_doubled);

    const bool exact = mode == WilcoxonMode::Exact
        || (mode == WilcoxonMode::Auto && magnitudes.size() <= 20);
    result.exact = exact;
    result.p_value = exact ? exact_p_value(ranks, observed)
                           : normal_p_value(magnitudes, observed / 2.0);
    result.p_value = std::min(result.p_value, 1.0);
    return result;
}

namespace {

    // One orientation of the evaluation matching discipline, restricted to
    // equal labels.
    std::size_t greedy_equal_label_matches(const std::vector<TimedEvent>& outer,
        const std::vector<TimedEvent>& inner, double tolerance)
    {
        std::vector<bool> used(inner.size(), false);
        std::size_t window_low = 0;
        std::size_t matched = 0;
        for (const auto& event : outer) {
            while (window_low < inner.size()
                && inner[window_low].time < event.time - tolerance) {
                ++window_low;
            }
            std::size_t best = inner.size();
            double best_distance = 0.0;
            for (std::size_t p = window_low;
                 p < inner.size() && inner[p].time <= event.time + tolerance; ++p) {
                if (used[p] || !(inner[p].label == event.label)) {
                    continue;
                }
                const double distance = std::abs(inner[p].time - event.time);
                if (best == inner.size() || distance < best_distance) {
                    best = p;
                    best_distance = distance;
                }
            }
            if (best != inner.size()) {
                used[best] = true;
                ++matched;
            }
        }
        return matched;
    }

    std::vector<TimedEvent> sorted_by_time(std::vector<TimedEvent> events)
    {
        std::stable_sort(events.begin(), events.end(),
            [](const TimedEvent& a, const TimedEvent& b) { return a.time < b.time; });
        return events;
    }

}

std::size_t event_diff(const std::vector<TimedEvent>& a, const std::vector<TimedEvent>& b,
    double tolerance)
{
    const auto sorted_a = sorted_by_time(a);
    const auto sorted_b = sorted_by_time(b);
    const std::size_t matched = std::max(
        greedy_equal_label_matches(sorted_a, sorted_b, tolerance),
        greedy_equal_label_matches(sorted_b, sorted_a, tolerance));
    return a.size() + b.size() - 2 * matched;
}

AblationReport ablation_report(const std::vector<SongRun>& full,
    const std::vector<SongRun>& ablated, const std::string& component)
{
    std::map<std::string, const SongRun*> by_id;
    for (const auto& run : full) {
        if (!by_id.emplace(run.song_id, &run).second) {
            throw Error("duplicate song_id in full runs: " + run.song_id);
        }
    }
    if (ablated.size() != full.size()) {
        throw Error("full and ablated run sets differ in size");
    }

    AblationReport report;
    report.component = component;
    report.songs = full.size();

    std::vector<const SongRun*> ablated_sorted;
    std::map<std::string, bool> seen_ablated;
    for (const auto& run : ablated) {
        const auto it = by_id.find(run.song_id);
        if (it == by_id.end()) {
            throw Error("ablated run for unknown song_id: " + run.song_id);
        }
        if (!seen_ablated.emplace(run.song_id, true).second) {
            throw Error("duplicate song_id in ablated runs: " + run.song_id);
        }
        ablated_sorted.push_back(&run);
    }
    std::sort(ablated_sorted.begin(), ablated_sorted.end(),
        [](const SongRun* a, const SongRun* b) { return a->song_id < b->song_id; });

    double delta_sum = 0.0;
    for (const SongRun* ablated_run : ablated_sorted) {
        const SongRun* full_run = by_id.at(ablated_run->song_id);
        const double delta = ablated_run->f1 - full_run->f1;
        report.per_song_delta.push_back(delta);
        delta_sum += delta;
        if (std::abs(delta) < kTieDelta) {
            ++report.ties;
        } else if (delta > 0.0) {
            ++report.better;
        } else {
            ++report.worse;
        }
        report.events_changed
            += event_diff(full_run->drum_events, ablated_run->drum_events);
    }
    report.delta_f1_mean = report.songs > 0 ? delta_sum / report.songs : 0.0;

    const auto wilcoxon = wilcoxon_signed_rank(report.per_song_delta);
    report.p_value = wilcoxon.p_value;
    report.degenerate = wilcoxon.degenerate;
    return report;
}

}
