// Acceptance suite: one check per release criterion, each printing a single
// PASS/FAIL line. Returns the number of failed criteria. Criteria that drive
// the installed CLI expect its path in the CHARTKIT_CLI environment variable
// (set by ctest).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "chartkit/ablation.hpp"
#include "chartkit/audio.hpp"
#include "chartkit/correctors.hpp"
#include "chartkit/errors.hpp"
#include "chartkit/evaluation.hpp"
#include "chartkit/manifest.hpp"
#include "chartkit/midi.hpp"
#include "chartkit/model.hpp"
#include "chartkit/prediction.hpp"
#include "chartkit/screening.hpp"
#include "chartkit/tempo.hpp"

#include "../helpers.hpp"

namespace fs = std::filesystem;
using namespace chartkit;
using chartkit::testing::click_track;
using chartkit::testing::click_track_switch;
using chartkit::testing::pe;
using chartkit::testing::pe_runner;

namespace {

struct Criterion {
    std::string name;
    bool passed = true;
    std::string detail;

    void require(bool condition, const std::string& message)
    {
        if (!condition && passed) {
            passed = false;
            detail = message;
        }
    }
};

double now_seconds()
{
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

// ---------------------------------------------------------------- criterion 1

std::size_t max_bipartite_matching(const std::vector<double>& gt,
    const std::vector<double>& pred, double tolerance)
{
    std::vector<std::vector<std::size_t>> adjacency(gt.size());
    for (std::size_t g = 0; g < gt.size(); ++g) {
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (std::abs(gt[g] - pred[p]) <= tolerance) {
                adjacency[g].push_back(p);
            }
        }
    }
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> owner(pred.size(), kUnset);
    std::vector<bool> visited;
    std::function<bool(std::size_t)> augment = [&](std::size_t g) {
        for (std::size_t p : adjacency[g]) {
            if (visited[p]) {
                continue;
            }
            visited[p] = true;
            if (owner[p] == kUnset || augment(owner[p])) {
                owner[p] = g;
                return true;
            }
        }
        return false;
    };
    std::size_t matched = 0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        visited.assign(pred.size(), false);
        if (augment(g)) {
            ++matched;
        }
    }
    return matched;
}

std::vector<TimedEvent> timed(const std::vector<double>& times)
{
    std::vector<TimedEvent> events;
    for (double t : times) {
        TimedEvent e;
        e.time = t;
        events.push_back(e);
    }
    return events;
}

Criterion criterion_matching_oracle()
{
    Criterion c { "matching oracle equivalence" };
    const double start = now_seconds();
    std::mt19937 rng(20260821);
    std::uniform_real_distribution<double> time_dist(0.0, 10.0);
    std::uniform_real_distribution<double> tol_dist(0.005, 0.5);
    std::uniform_int_distribution<int> count_dist(0, 30);
    std::size_t sparse_instances = 0;

    for (int trial = 0; trial < 1200; ++trial) {
        std::vector<double> gt(count_dist(rng));
        std::vector<double> pred(count_dist(rng));
        for (double& t : gt) {
            t = time_dist(rng);
        }
        for (double& t : pred) {
            t = time_dist(rng);
        }
        std::sort(gt.begin(), gt.end());
        std::sort(pred.begin(), pred.end());
        const double tolerance = tol_dist(rng);

        const std::size_t greedy
            = greedy_match(timed(gt), timed(pred), tolerance).pairs.size();
        const std::size_t best = max_bipartite_matching(gt, pred, tolerance);
        c.require(greedy <= best,
            "greedy produced more pairs than the maximum matching (trial "
                + std::to_string(trial) + ")");

        double min_gap = 1e18;
        for (std::size_t i = 1; i < gt.size(); ++i) {
            min_gap = std::min(min_gap, gt[i] - gt[i - 1]);
        }
        for (std::size_t i = 1; i < pred.size(); ++i) {
            min_gap = std::min(min_gap, pred[i] - pred[i - 1]);
        }
        if (min_gap > 2.0 * tolerance) {
            ++sparse_instances;
            c.require(greedy == best,
                "greedy under the sparse-gap condition missed pairs (trial "
                    + std::to_string(trial) + ")");
        }
    }
    const double elapsed = now_seconds() - start;
    c.require(sparse_instances >= 20, "generator produced too few sparse instances");
    c.require(elapsed < 10.0, "exceeded the 10 s budget");
    return c;
}

// ---------------------------------------------------------------- criterion 2

Criterion criterion_offset_recovery()
{
    Criterion c { "offset recovery" };
    std::vector<double> times;
    for (int i = 0; i < 60; ++i) {
        times.push_back(1.0 + 0.5 * i);
    }
    Chart gt;
    {
        std::vector<TimedEvent> events;
        for (std::size_t i = 0; i < times.size(); ++i) {
            TimedEvent e;
            e.time = times[i];
            e.label = Label { static_cast<int>(i % 5), false };
            events.push_back(e);
        }
        gt.tracks[Instrument::Drums] = Track::normalized(Instrument::Drums, events);
    }

    for (int k = -20; k <= 20; ++k) {
        const double delta = 0.010 * k;
        Chart pred = gt;
        for (TimedEvent& e : pred.tracks[Instrument::Drums].events) {
            e.time += delta;
        }
        const OffsetSearchResult result = offset_search(gt, pred, 0.05);
        c.require(std::abs(result.best_offset + delta) < 1e-9,
            "delta " + std::to_string(delta) + " recovered "
                + std::to_string(result.best_offset));
        c.require(result.per_instrument.at(Instrument::Drums).prf.f1 == 1.0,
            "delta " + std::to_string(delta) + " F1 below 1");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 3

Criterion criterion_ceiling_fixture()
{
    Criterion c { "ceiling fixture 89/11" };
    std::vector<double> gt_times;
    std::vector<double> peak_times;
    for (int i = 0; i < 89; ++i) {
        const double t = 1.0 + 0.5 * i;
        gt_times.push_back(t);
        peak_times.push_back(t + 0.004);
    }
    for (int i = 0; i < 11; ++i) {
        const double t = 200.0 + 0.5 * i;
        gt_times.push_back(t);
        peak_times.push_back(t + 0.130);
    }
    const CeilingResult result = gt_ceiling(gt_times, peak_times, 0.05);
    c.require(result.gt_count == 100, "expected 100 ground-truth events");
    c.require(result.fraction_within == 0.89,
        "fraction_within " + std::to_string(result.fraction_within));

    std::size_t total = 0;
    std::size_t inside = 0;
    for (std::size_t b = 0; b < result.histogram.size(); ++b) {
        total += result.histogram[b];
        if (std::abs(result.bin_centers[b]) < 0.05) {
            inside += result.histogram[b];
        }
    }
    c.require(total == 100, "histogram mass " + std::to_string(total));
    c.require(inside == 89, "inside-tolerance mass " + std::to_string(inside));
    return c;
}

// ---------------------------------------------------------------- criterion 4

double wilcoxon_enumeration(const std::vector<double>& deltas)
{
    std::vector<double> magnitudes;
    for (double d : deltas) {
        if (std::abs(d) >= 1e-12) {
            magnitudes.push_back(std::abs(d));
        }
    }
    const std::size_t n = magnitudes.size();
    if (n == 0) {
        return 1.0;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
        [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) {
            ++j;
        }
        const double average = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = average;
        }
        i = j + 1;
    }

    double w_plus = 0.0;
    double total = 0.0;
    std::size_t used = 0;
    for (double d : deltas) {
        if (std::abs(d) < 1e-12) {
            continue;
        }
        total += ranks[used];
        if (d > 0.0) {
            w_plus += ranks[used];
        }
        ++used;
    }
    const double observed = std::min(w_plus, total - w_plus);

    std::size_t count = 0;
    for (std::size_t mask = 0; mask < (static_cast<std::size_t>(1) << n); ++mask) {
        double w = 0.0;
        for (std::size_t bit = 0; bit < n; ++bit) {
            if (mask & (static_cast<std::size_t>(1) << bit)) {
                w += ranks[bit];
            }
        }
        if (std::min(w, total - w) <= observed + 1e-9) {
            ++count;
        }
    }
    return static_cast<double>(count)
        / static_cast<double>(static_cast<std::size_t>(1) << n);
}

Criterion criterion_wilcoxon()
{
    Criterion c { "Wilcoxon exact vs enumeration" };
    const WilcoxonResult example
        = wilcoxon_signed_rank({ 0.01, 0.02, 0.03, -0.005, 0.015 });
    c.require(example.p_value == 0.125,
        "worked example p = " + std::to_string(example.p_value));

    std::mt19937 rng(20260821);
    std::uniform_int_distribution<int> size_dist(1, 12);
    std::uniform_int_distribution<int> grid_dist(-9, 9);
    for (int trial = 0; trial < 600; ++trial) {
        std::vector<double> deltas(size_dist(rng));
        for (double& d : deltas) {
            d = 0.005 * grid_dist(rng);
        }
        const double exact = wilcoxon_signed_rank(deltas, WilcoxonMode::Exact).p_value;
        const double oracle = wilcoxon_enumeration(deltas);
        c.require(exact == oracle,
            "trial " + std::to_string(trial) + ": exact " + std::to_string(exact)
                + " vs enumeration " + std::to_string(oracle));
    }
    return c;
}

// ---------------------------------------------------------------- criterion 5

Criterion criterion_tempo()
{
    Criterion c { "tempo refinement and change detection" };
    const double start = now_seconds();

    for (double bpm : { 60.4, 127.3, 183.7 }) {
        const AudioBuffer audio = click_track(bpm, 30.0);
        const OnsetEnvelope envelope = onset_envelope(audio);
        const TempoEstimate refined = refine_bpm(envelope, estimate_bpm_coarse(envelope));
        c.require(std::abs(refined.bpm - bpm) <= 0.1,
            std::to_string(bpm) + " BPM refined to " + std::to_string(refined.bpm));
        c.require(refined.coherence > 0.99,
            std::to_string(bpm) + " BPM coherence " + std::to_string(refined.coherence));
    }

    const AudioBuffer switched = click_track_switch(120.0, 130.0, 15.0, 40.0);
    const OnsetEnvelope envelope = onset_envelope(switched);
    const TempoEstimate global = refine_bpm(envelope, estimate_bpm_coarse(envelope));
    const std::vector<TempoChange> changes = detect_tempo_changes(envelope, global);
    bool found = false;
    for (const TempoChange& change : changes) {
        // Within two beats of the 15 s switch (beats of the outgoing tempo).
        if (std::abs(change.time - 15.0) <= 2.0 * (60.0 / 120.0)
            && std::abs(change.bpm - 130.0) <= 2.0) {
            found = true;
        }
    }
    c.require(found, "no change detected within 2 beats of the 120->130 switch");

    const double elapsed = now_seconds() - start;
    c.require(elapsed < 30.0, "exceeded the 30 s budget");
    return c;
}

// ---------------------------------------------------------------- criterion 6

Criterion criterion_screening()
{
    Criterion c { "screening statistic and regression" };

    MixStats unit_stats;
    unit_stats.mean = 0.0;
    unit_stats.stddev = 1.0;

    AudioBuffer silent;
    silent.sample_rate = 22050;
    silent.samples.assign(22050 * 4, 0.0f);
    const ScreenResult silent_result = screen_stem(silent, unit_stats);
    c.require(silent_result.statistic == 0.0, "silent statistic not exactly 0");
    c.require(!silent_result.passed, "silent stem passed");

    // The boundary is inclusive: a statistic exactly equal to the threshold
    // passes. A constant 0.5 stem has statistic exactly 0.5, so screening it
    // at threshold 0.5 sits exactly on the boundary.
    AudioBuffer half;
    half.sample_rate = 22050;
    half.samples.assign(22050 * 3, 0.5f);
    c.require(envelope_statistic(half, unit_stats) == 0.5, "constant stem not 0.5");
    c.require(screen_stem(half, unit_stats, 0.5).passed, "boundary equality failed");

    AudioBuffer just_below;
    just_below.sample_rate = 22050;
    just_below.samples.assign(22050 * 3, 0.0179f);
    c.require(!screen_stem(just_below, unit_stats).passed, "0.0179 stem passed at 0.018");
    AudioBuffer just_above;
    just_above.sample_rate = 22050;
    just_above.samples.assign(22050 * 3, 0.019f);
    c.require(screen_stem(just_above, unit_stats).passed, "0.019 stem failed at 0.018");

    // Synthetic loop regression: value frozen from the independent
    // straight-line recomputation in tests/oracles/screen_oracle.py, and
    // bit-for-bit stable across repeated evaluations.
    const MixStats stats = compute_mix_stats(chartkit::testing::screening_fixture_mix());
    const double first
        = envelope_statistic(chartkit::testing::screening_fixture_stem(), stats);
    const double second
        = envelope_statistic(chartkit::testing::screening_fixture_stem(), stats);
    c.require(first == second, "statistic differs between two runs");
    c.require(std::abs(first - 0.4019349340477046) < 1e-9,
        "regression value drifted: " + std::to_string(first));
    return c;
}

// ---------------------------------------------------------------- criterion 7

Chart random_chart(std::mt19937& rng)
{
    Chart chart;
    chart.resolution = 480;
    chart.tempo_map.segments.clear();
    std::int64_t tick = 0;
    const int segments = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < segments; ++i) {
        chart.tempo_map.segments.push_back(
            TempoSegment { tick, std::uniform_int_distribution<int>(200000, 1000000)(rng) });
        tick += std::uniform_int_distribution<std::int64_t>(480, 4800)(rng);
    }
    const Instrument instruments[] = { Instrument::Drums, Instrument::Guitar,
        Instrument::Bass, Instrument::Vocals, Instrument::Keys };
    for (Instrument instrument : instruments) {
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
            continue;
        }
        std::vector<TimedEvent> events;
        const int count = std::uniform_int_distribution<int>(1, 50)(rng);
        // Overlapping notes on one key have no faithful SMF form, so
        // consecutive events keep a gap wider than the longest sustain.
        std::int64_t on_tick = std::uniform_int_distribution<std::int64_t>(0, 500)(rng);
        for (int i = 0; i < count; ++i) {
            TimedEvent event;
            event.time = ticks_to_seconds(chart.tempo_map, chart.resolution, on_tick);
            if (instrument == Instrument::Drums) {
                const int pad = std::uniform_int_distribution<int>(0, 4)(rng);
                const bool cymbal
                    = pad >= 2 && std::uniform_int_distribution<int>(0, 1)(rng) == 1;
                event.label = Label { pad, cymbal };
            } else if (instrument == Instrument::Vocals) {
                event.label
                    = Label { std::uniform_int_distribution<int>(36, 84)(rng), false };
            } else {
                event.label = Label { std::uniform_int_distribution<int>(0, 4)(rng), false };
            }
            if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
                const std::int64_t len
                    = std::uniform_int_distribution<std::int64_t>(40, 2000)(rng);
                event.sustain
                    = ticks_to_seconds(chart.tempo_map, chart.resolution, on_tick + len)
                    - event.time;
            }
            events.push_back(event);
            on_tick += std::uniform_int_distribution<std::int64_t>(2100, 3000)(rng);
        }
        chart.tracks[instrument] = Track::normalized(instrument, std::move(events));
    }
    return chart;
}

bool charts_equal(const Chart& a, const Chart& b, std::string& why)
{
    if (a.resolution != b.resolution) {
        why = "resolution differs";
        return false;
    }
    if (a.tempo_map.segments.size() != b.tempo_map.segments.size()) {
        why = "tempo segment count differs";
        return false;
    }
    for (std::size_t i = 0; i < a.tempo_map.segments.size(); ++i) {
        if (a.tempo_map.segments[i].start_tick != b.tempo_map.segments[i].start_tick
            || a.tempo_map.segments[i].us_per_quarter
                != b.tempo_map.segments[i].us_per_quarter) {
            why = "tempo segment differs";
            return false;
        }
    }
    if (a.tracks.size() != b.tracks.size()) {
        why = "track count differs";
        return false;
    }
    for (const auto& [instrument, track] : a.tracks) {
        const auto it = b.tracks.find(instrument);
        if (it == b.tracks.end() || it->second.events.size() != track.events.size()) {
            why = std::string("track mismatch for ") + instrument_name(instrument);
            return false;
        }
        for (std::size_t i = 0; i < track.events.size(); ++i) {
            const TimedEvent& x = track.events[i];
            const TimedEvent& y = it->second.events[i];
            if (x.label != y.label || std::abs(x.time - y.time) > 1e-9
                || std::abs(x.sustain - y.sustain) > 1e-9) {
                why = std::string("event differs on ") + instrument_name(instrument)
                    + " index " + std::to_string(i);
                return false;
            }
        }
    }
    return true;
}

Criterion criterion_midi_round_trip()
{
    Criterion c { "MIDI round-trip" };
    std::mt19937 rng(20260821);
    for (int trial = 0; trial < 200; ++trial) {
        const Chart chart = random_chart(rng);
        const std::vector<std::uint8_t> bytes = emit_chart_midi(chart);
        const std::vector<std::uint8_t> again = emit_chart_midi(chart);
        c.require(bytes == again, "emission differs between runs (trial "
                + std::to_string(trial) + ")");
        const ParsedChart parsed = parse_chart_midi(bytes.data(), bytes.size());
        std::string why;
        const bool equal = charts_equal(chart, parsed.chart, why);
        c.require(equal, "round trip failed at trial " + std::to_string(trial) + ": " + why);
    }
    return c;
}

// ---------------------------------------------------------------- criterion 8

bool events_equal(const std::vector<PredictionEvent>& a,
    const std::vector<PredictionEvent>& b)
{
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].time != b[i].time || !(a[i].label == b[i].label)
            || a[i].confidence != b[i].confidence
            || a[i].runner_up.has_value() != b[i].runner_up.has_value()) {
            return false;
        }
        if (a[i].runner_up && !(*a[i].runner_up == *b[i].runner_up)) {
            return false;
        }
    }
    return true;
}

std::vector<PredictionEvent> random_drum_stream(std::mt19937& rng)
{
    std::vector<PredictionEvent> events;
    double t = 0.5;
    const int count = std::uniform_int_distribution<int>(0, 60)(rng);
    std::uniform_real_distribution<double> ioi(0.02, 0.3);
    std::uniform_int_distribution<int> pad_dist(0, 4);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> conf(0.05, 1.0);
    for (int i = 0; i < count; ++i) {
        t += ioi(rng);
        const int pad = pad_dist(rng);
        PredictionEvent e = pe(t, pad, pad >= 2 && coin(rng) == 1, conf(rng));
        if (coin(rng) == 1) {
            const int runner = pad_dist(rng);
            e.runner_up = Label { runner, runner >= 2 && coin(rng) == 1 };
            e.runner_up_confidence = conf(rng);
        }
        events.push_back(e);
    }
    return events;
}

OnsetEnvelope flat_envelope()
{
    OnsetEnvelope envelope;
    envelope.values.assign(2000, 0.1f);
    envelope.hop_seconds = 512.0 / 22050.0;
    return envelope;
}

StemBandEnergy random_band_energy(std::mt19937& rng, double duration)
{
    StemBandEnergy bands;
    bands.hop_seconds = 512.0 / 22050.0;
    const std::size_t frames
        = static_cast<std::size_t>(duration / bands.hop_seconds) + 8;
    std::uniform_real_distribution<double> level(0.0, 1.0);
    std::uniform_int_distribution<int> silent(0, 4);
    for (std::size_t f = 0; f < frames; ++f) {
        bands.kick.push_back(silent(rng) == 0 ? 0.0f : static_cast<float>(level(rng)));
        bands.snare.push_back(silent(rng) == 0 ? 0.0f : static_cast<float>(level(rng)));
        bands.cymbal.push_back(silent(rng) == 0 ? 0.0f : static_cast<float>(level(rng)));
    }
    return bands;
}

Criterion criterion_correctors(const fs::path& work, const std::string& cli,
    const fs::path& manifest_path, const fs::path& full_dir)
{
    Criterion c { "corrector examples, idempotence and null ablation" };
    const CorrectorConfig config;
    const OnsetEnvelope env = flat_envelope();

    // streak_smooth examples
    {
        std::vector<PredictionEvent> in;
        for (int i = 0; i < 6; ++i) {
            in.push_back(pe(1.0 + 0.15 * i, i == 3 ? 3 : 2, i != 3));
        }
        const auto out = streak_smooth(in, config);
        bool all_yellow = out.size() == 6;
        for (const auto& e : out) {
            all_yellow = all_yellow && e.label == Label { 2, true };
        }
        c.require(all_yellow, "streak example 1: interloper not absorbed");

        std::vector<PredictionEvent> sparse = { pe(1.0, 2, true), pe(1.15, 3, false),
            pe(1.3, 2, true), pe(1.45, 2, true) };
        c.require(events_equal(streak_smooth(sparse, config), sparse),
            "streak example 2: short run was modified");

        std::vector<PredictionEvent> pair;
        for (int i = 0; i < 7; ++i) {
            pair.push_back(pe(1.0 + 0.15 * i, (i == 3 || i == 4) ? 3 : 2,
                !(i == 3 || i == 4)));
        }
        c.require(events_equal(streak_smooth(pair, config), pair),
            "streak example 3: adjacent outliers were modified");
    }

    // kick_floor_tom examples
    {
        const std::vector<PredictionEvent> stacked
            = { pe(10.0, 0, false), pe(10.0, 4, false) };
        const auto out = kick_floor_tom(stacked, config);
        c.require(out.size() == 1 && out[0].label == Label { 0, false },
            "kick/floor example 1: green tom survived");

        const std::vector<PredictionEvent> crash
            = { pe(10.0, 0, false), pe(10.0, 4, true) };
        c.require(events_equal(kick_floor_tom(crash, config), crash),
            "kick/floor example 2: green cymbal was removed");

        const std::vector<PredictionEvent> apart
            = { pe(10.0, 0, false), pe(10.05, 4, false) };
        c.require(events_equal(kick_floor_tom(apart, config), apart),
            "kick/floor example 3: separated events were modified");
    }

    // roll_veto examples
    {
        std::vector<PredictionEvent> roll;
        for (int i = 0; i < 6; ++i) {
            roll.push_back(i % 2 == 0 ? pe(1.0 + 0.08 * i, 1, false)
                                      : pe(1.0 + 0.08 * i, 2, true));
        }
        const auto out = roll_veto(roll, config);
        bool all_red = out.size() == 6;
        for (const auto& e : out) {
            all_red = all_red && e.label == Label { 1, false };
        }
        c.require(all_red, "roll example 1: tie did not go to red");

        std::vector<PredictionEvent> slow;
        for (int i = 0; i < 6; ++i) {
            slow.push_back(i % 2 == 0 ? pe(1.0 + 0.2 * i, 1, false)
                                      : pe(1.0 + 0.2 * i, 2, true));
        }
        c.require(events_equal(roll_veto(slow, config), slow),
            "roll example 2: slow alternation was modified");

        std::vector<PredictionEvent> reds;
        for (int i = 0; i < 4; ++i) {
            reds.push_back(pe(1.0 + 0.08 * i, 1, false));
        }
        c.require(events_equal(roll_veto(reds, config), reds),
            "roll example 3: uniform reds were modified");
    }

    // costack_veto examples
    {
        const std::vector<PredictionEvent> stack
            = { pe(2.0, 4, true, 0.9), pe(2.01, 3, true, 0.4) };
        const auto out = costack_veto(stack, config);
        c.require(out.size() == 1 && out[0].label == Label { 4, true },
            "costack example 1: higher-confidence crash lost");

        const std::vector<PredictionEvent> lone = { pe(2.0, 4, true, 0.9) };
        c.require(events_equal(costack_veto(lone, config), lone),
            "costack example 2: single cymbal was modified");

        const std::vector<PredictionEvent> mixed
            = { pe(2.0, 4, true, 0.9), pe(2.01, 3, false, 0.4) };
        c.require(events_equal(costack_veto(mixed, config), mixed),
            "costack example 3: cymbal+tom stack was modified");
    }

    // fill_rescue examples
    {
        std::vector<PredictionEvent> fill = { pe(1.0, 1, false), pe(1.1, 3, false),
            pe(1.2, 1, false), pe(1.3, 3, true, 0.3), pe(1.4, 1, false),
            pe(1.5, 1, false), pe(1.6, 1, false), pe(1.7, 1, false) };
        const auto out = fill_rescue(fill, env, config);
        c.require(out.size() == 8 && out[3].label == Label { 3, false },
            "fill example 1: low-confidence cymbal kept its label");

        std::vector<PredictionEvent> sparse;
        for (int i = 0; i < 8; ++i) {
            sparse.push_back(pe(1.0 + 0.3 * i, 3, true, 0.3));
        }
        c.require(events_equal(fill_rescue(sparse, env, config), sparse),
            "fill example 2: sparse passage was modified");

        std::vector<PredictionEvent> confident = { pe(1.0, 1, false), pe(1.1, 1, false),
            pe(1.2, 1, false), pe(1.3, 3, true, 0.9), pe(1.4, 1, false),
            pe(1.5, 1, false), pe(1.6, 1, false) };
        c.require(events_equal(fill_rescue(confident, env, config), confident),
            "fill example 3: confident cymbal was modified");
    }

    // arbiter examples
    {
        StemBandEnergy bands;
        bands.hop_seconds = 0.01;
        bands.kick.assign(1000, 1.0f);
        bands.snare.assign(1000, 1.0f);
        bands.cymbal.assign(1000, 1.0f);
        for (std::size_t f = 490; f <= 510; ++f) {
            bands.kick[f] = 0.0f;
        }
        const std::vector<PredictionEvent> quiet_kick
            = { pe_runner(5.0, 0, false, 0.9, 1, false, 0.7) };
        const auto out = arbiter(quiet_kick, bands, config);
        c.require(out.size() == 1 && out[0].label == Label { 1, false }
                && !out[0].runner_up.has_value(),
            "arbiter example 1: runner-up not adopted");

        StemBandEnergy flat;
        flat.hop_seconds = 0.01;
        flat.kick.assign(1000, 0.5f);
        flat.snare.assign(1000, 0.5f);
        flat.cymbal.assign(1000, 0.5f);
        const std::vector<PredictionEvent> steady
            = { pe_runner(5.0, 0, false, 0.9, 1, false, 0.7) };
        c.require(events_equal(arbiter(steady, flat, config), steady),
            "arbiter example 2: median-level bands changed an event");

        const std::vector<PredictionEvent> no_runner = { pe(5.0, 0, false, 0.9) };
        c.require(events_equal(arbiter(no_runner, bands, config), no_runner),
            "arbiter example 3: event without runner-up changed");
    }

    // Idempotence on 100 random streams, per rule.
    std::mt19937 rng(20260822);
    for (int trial = 0; trial < 100; ++trial) {
        const auto events = random_drum_stream(rng);
        const double duration = events.empty() ? 1.0 : events.back().time + 1.0;
        const auto bands = random_band_energy(rng, duration);

        const auto once_arbiter = arbiter(events, bands, config);
        c.require(events_equal(arbiter(once_arbiter, bands, config), once_arbiter),
            "arbiter not idempotent (trial " + std::to_string(trial) + ")");
        const auto once_streak = streak_smooth(events, config);
        c.require(events_equal(streak_smooth(once_streak, config), once_streak),
            "streak_smooth not idempotent (trial " + std::to_string(trial) + ")");
        const auto once_roll = roll_veto(events, config);
        c.require(events_equal(roll_veto(once_roll, config), once_roll),
            "roll_veto not idempotent (trial " + std::to_string(trial) + ")");
        const auto once_costack = costack_veto(events, config);
        c.require(events_equal(costack_veto(once_costack, config), once_costack),
            "costack_veto not idempotent (trial " + std::to_string(trial) + ")");
        const auto once_kick = kick_floor_tom(events, config);
        c.require(events_equal(kick_floor_tom(once_kick, config), once_kick),
            "kick_floor_tom not idempotent (trial " + std::to_string(trial) + ")");
        const auto once_fill = fill_rescue(events, env, config);
        c.require(events_equal(fill_rescue(once_fill, env, config), once_fill),
            "fill_rescue not idempotent (trial " + std::to_string(trial) + ")");

        CorrectorConfig disabled;
        disabled.arbiter_enabled = false;
        disabled.streak_smooth_enabled = false;
        disabled.roll_veto_enabled = false;
        disabled.costack_veto_enabled = false;
        disabled.kick_floor_tom_enabled = false;
        disabled.fill_rescue_enabled = false;
        c.require(events_equal(run_pipeline(events, disabled, nullptr, nullptr), events),
            "all-disabled pipeline is not the identity (trial "
                + std::to_string(trial) + ")");
    }

    // Null ablation through the real CLI: identical directories.
    if (cli.empty()) {
        c.require(false, "CHARTKIT_CLI not set; cannot drive the ablate subcommand");
        return c;
    }
    const fs::path out_dir = work / "ablate-null";
    fs::create_directories(out_dir);
    const std::string command = "\"" + cli + "\" ablate --manifest \""
        + manifest_path.string() + "\" --full \"" + full_dir.string() + "\" --ablated \""
        + full_dir.string() + "\" --component none --out \"" + out_dir.string()
        + "\" > \"" + (out_dir / "stdout.txt").string() + "\" 2>&1";
    const int status = std::system(command.c_str());
    c.require(status == 0, "ablate on identical dirs exited nonzero");

    std::ifstream json_file(out_dir / "ablate.json");
    c.require(json_file.good(), "ablate.json missing");
    if (json_file.good()) {
        nlohmann::json parsed;
        json_file >> parsed;
        const auto& row = parsed.at(0);
        c.require(row["delta_f1_mean"].get<double>() == 0.0, "null ablation delta != 0");
        c.require(row["p_value"].get<double>() == 1.0, "null ablation p != 1");
        c.require(row["better"].get<int>() == 0 && row["worse"].get<int>() == 0,
            "null ablation produced winners");
        c.require(row["ties"].get<std::size_t>() == row["songs"].get<std::size_t>(),
            "null ablation ties != song count");
        c.require(row["events_changed"].get<int>() == 0, "null ablation changed events");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 9

Criterion criterion_phase_coherence()
{
    Criterion c { "phase coherence extremes" };

    // Exact grids: beat periods representable exactly in binary floating
    // point, so every phase works out to exactly zero.
    const double cases[][2] = { { 60.0, 1.0 }, { 96.0, 0.625 }, { 120.0, 0.5 },
        { 192.0, 0.3125 } };
    for (const auto& [bpm, beat] : cases) {
        std::vector<double> times;
        std::vector<double> weights;
        for (int k = 0; k < 64; ++k) {
            times.push_back(k * beat);
            weights.push_back(1.0 + (k % 4) * 0.25);
        }
        const CoherenceResult result = phase_coherence(times, weights, bpm);
        c.require(result.r == 1.0,
            "grid at " + std::to_string(bpm) + " BPM gave R = " + std::to_string(result.r));
    }

    std::mt19937 rng(20260821);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    int low = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> times(200);
        std::vector<double> weights(200, 1.0);
        for (double& t : times) {
            t = dist(rng);
        }
        if (phase_coherence(times, weights, 120.0).r < 0.15) {
            ++low;
        }
    }
    c.require(low == 100,
        "only " + std::to_string(low) + "/100 random trials had R < 0.15");
    return c;
}

// --------------------------------------------------------------- criterion 10

struct Fixture {
    fs::path root;
    fs::path manifest_path;
    fs::path full_dir;
    fs::path ablated_dir;
};

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
        static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

// Three synthetic songs: drum charts on a 120 BPM grid, click-derived mix
// and stem audio, and two prediction variants (faithful and degraded).
Fixture build_fixture(const fs::path& work)
{
    Fixture fixture;
    fixture.root = work / "benchmark";
    fixture.full_dir = fixture.root / "pred-full";
    fixture.ablated_dir = fixture.root / "pred-ablated";
    fs::create_directories(fixture.root);
    fs::create_directories(fixture.full_dir);
    fs::create_directories(fixture.ablated_dir);

    Manifest manifest;
    const char* ids[] = { "synth-a", "synth-b", "synth-c" };
    const char* genres[] = { "rock", "punk", "metal" };
    for (int s = 0; s < 3; ++s) {
        const std::string id = ids[s];
        const double seconds = 20.0;

        Chart chart;
        chart.resolution = 480;
        std::vector<TimedEvent> events;
        const int pattern[] = { 0, 2, 1, 2 };  // kick, hat, snare, hat
        int beat = 0;
        for (double t = 0.5; t < seconds - 0.5; t += 0.25, ++beat) {
            TimedEvent e;
            e.time = t;
            const int pad = pattern[beat % 4];
            e.label = Label { pad, pad == 2 };
            events.push_back(e);
        }
        chart.tracks[Instrument::Drums]
            = Track::normalized(Instrument::Drums, std::move(events));
        write_chart_midi_file(chart, (fixture.root / (id + ".mid")).string());

        const AudioBuffer mix = click_track(120.0 + 4.0 * s, seconds);
        write_bytes(fixture.root / (id + ".mix.wav"), encode_wav_pcm16(mix));
        write_bytes(fixture.root / (id + ".drums.wav"), encode_wav_pcm16(mix));

        // Faithful predictions: tiny alternating jitter, every event kept.
        PredictionFile full;
        full.instrument = Instrument::Drums;
        const auto& gt_events = chart.tracks[Instrument::Drums].events;
        for (std::size_t i = 0; i < gt_events.size(); ++i) {
            PredictionEvent e;
            e.time = gt_events[i].time + (i % 2 == 0 ? 0.003 : -0.003);
            e.label = gt_events[i].label;
            e.confidence = 0.9;
            full.events.push_back(e);
        }
        save_predictions(full,
            (fixture.full_dir / (id + ".drums.tsv")).string());

        // Degraded predictions: drop every seventh event, flip some labels.
        PredictionFile ablated;
        ablated.instrument = Instrument::Drums;
        for (std::size_t i = 0; i < full.events.size(); ++i) {
            if (i % 7 == 3) {
                continue;
            }
            PredictionEvent e = full.events[i];
            if (i % 5 == 0) {
                e.label = Label { 4, false };
            }
            ablated.events.push_back(e);
        }
        save_predictions(ablated,
            (fixture.ablated_dir / (id + ".drums.tsv")).string());

        ManifestEntry entry;
        entry.song_id = id;
        entry.title = std::string("Synthetic ") + static_cast<char>('A' + s);
        entry.artist = "fixture";
        entry.genre = genres[s];
        entry.mix_audio_path = id + ".mix.wav";
        entry.drum_stem_path = id + ".drums.wav";
        entry.gt_chart_path = id + ".mid";
        manifest.entries.push_back(entry);
    }
    fixture.manifest_path = fixture.root / "manifest.json";
    save_manifest(manifest, fixture.manifest_path.string());
    return fixture;
}

Criterion criterion_end_to_end(const Fixture& fixture, const std::string& cli)
{
    Criterion c { "end-to-end screen/evaluate/ablate" };
    if (cli.empty()) {
        c.require(false, "CHARTKIT_CLI not set; cannot drive the pipeline");
        return c;
    }
    const double start = now_seconds();
    const fs::path out = fixture.root / "out";
    fs::create_directories(out / "screen");
    fs::create_directories(out / "eval");
    fs::create_directories(out / "ablate");

    auto run = [&](const std::string& args, const std::string& log) {
        const std::string command = "\"" + cli + "\" " + args + " > \""
            + (out / log).string() + "\" 2>&1";
        return std::system(command.c_str());
    };

    const int screen_status = run("screen --manifest \"" + fixture.manifest_path.string()
            + "\" --out \"" + (out / "screen").string() + "\"",
        "screen.log");
    c.require(screen_status == 0, "screen exited nonzero");
    {
        std::ifstream json_file(out / "screen" / "screen.json");
        c.require(json_file.good(), "screen.json missing");
        if (json_file.good()) {
            nlohmann::json parsed;
            json_file >> parsed;
            c.require(parsed["passed"].get<int>() == 3, "screen did not pass all 3 songs");
        }
    }

    const int eval_status
        = run("evaluate --manifest \"" + (out / "screen" / "manifest.json").string()
                + "\" --predictions \"" + fixture.full_dir.string() + "\" --audio-root \""
                + fixture.root.string() + "\" --passed-only --out \""
                + (out / "eval").string() + "\"",
            "eval.log");
    c.require(eval_status == 0, "evaluate exited nonzero");
    {
        std::ifstream json_file(out / "eval" / "eval.json");
        c.require(json_file.good(), "eval.json missing");
        if (json_file.good()) {
            nlohmann::json parsed;
            json_file >> parsed;
            c.require(parsed["errors"].get<int>() == 0, "evaluate reported errors");
            c.require(parsed["songs"].size() == 3, "evaluate did not cover 3 songs");
            const double f1
                = parsed["aggregate"]["drums"]["micro"]["f1"].get<double>();
            c.require(f1 > 0.99, "faithful predictions scored F1 " + std::to_string(f1));
        }
        std::ifstream text_file(out / "eval" / "eval.txt");
        std::stringstream buffer;
        buffer << text_file.rdbuf();
        const std::string text = buffer.str();
        c.require(text.find("instrument") != std::string::npos
                && text.find("macro_f1") != std::string::npos
                && text.find("song_id") != std::string::npos,
            "evaluation table missing expected columns");
    }

    const int ablate_status
        = run("ablate --manifest \"" + fixture.manifest_path.string() + "\" --full \""
                + fixture.full_dir.string() + "\" --ablated \""
                + fixture.ablated_dir.string() + "\" --component streak_smooth --out \""
                + (out / "ablate").string() + "\"",
            "ablate.log");
    c.require(ablate_status == 0, "ablate exited nonzero");
    {
        std::ifstream json_file(out / "ablate" / "ablate.json");
        c.require(json_file.good(), "ablate.json missing");
        if (json_file.good()) {
            nlohmann::json parsed;
            json_file >> parsed;
            const auto& row = parsed.at(0);
            c.require(row["component"].get<std::string>() == "streak_smooth",
                "component name not carried through");
            c.require(row["delta_f1_mean"].get<double>() < 0.0,
                "degraded predictions did not lower F1");
            c.require(row["worse"].get<int>() == 3, "expected all 3 songs to be worse");
            c.require(row["events_changed"].get<int>() > 0,
                "event diff missed the degradation");
        }
        std::ifstream text_file(out / "ablate" / "ablate.txt");
        std::stringstream buffer;
        buffer << text_file.rdbuf();
        const std::string text = buffer.str();
        c.require(text.find("component") != std::string::npos
                && text.find("delta_f1") != std::string::npos
                && text.find("B/W/T") != std::string::npos,
            "ablation table missing expected columns");
    }

    const double elapsed = now_seconds() - start;
    c.require(elapsed < 60.0, "exceeded the 60 s budget");
    return c;
}

}

int main()
{
    const char* cli_env = std::getenv("CHARTKIT_CLI");
    const std::string cli = cli_env != nullptr ? cli_env : "";

    std::error_code ec;
    const fs::path work
        = fs::temp_directory_path() / ("chartkit-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(work, ec);
    fs::create_directories(work);

    Fixture fixture;
    bool fixture_ok = true;
    std::string fixture_error;
    try {
        fixture = build_fixture(work);
    } catch (const std::exception& error) {
        fixture_ok = false;
        fixture_error = error.what();
    }

    std::vector<Criterion> results;
    results.push_back(criterion_matching_oracle());
    results.push_back(criterion_offset_recovery());
    results.push_back(criterion_ceiling_fixture());
    results.push_back(criterion_wilcoxon());
    results.push_back(criterion_tempo());
    results.push_back(criterion_screening());
    results.push_back(criterion_midi_round_trip());
    if (fixture_ok) {
        results.push_back(
            criterion_correctors(work, cli, fixture.manifest_path, fixture.full_dir));
    } else {
        Criterion c { "corrector examples, idempotence and null ablation" };
        c.require(false, "fixture construction failed: " + fixture_error);
        results.push_back(c);
    }
    results.push_back(criterion_phase_coherence());
    if (fixture_ok) {
        results.push_back(criterion_end_to_end(fixture, cli));
    } else {
        Criterion c { "end-to-end screen/evaluate/ablate" };
        c.require(false, "fixture construction failed: " + fixture_error);
        results.push_back(c);
    }

    int failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Criterion& criterion = results[i];
        if (criterion.passed) {
            std::printf("criterion %2zu %-48s PASS\n", i + 1, criterion.name.c_str());
        } else {
            ++failures;
            std::printf("criterion %2zu %-48s FAIL  %s\n", i + 1, criterion.name.c_str(),
                criterion.detail.c_str());
        }
    }
    if (failures == 0) {
        fs::remove_all(work, ec);
        std::printf("all %zu criteria passed\n", results.size());
    } else {
        std::printf("%d criteria failed; fixtures kept in %s\n", failures,
            work.string().c_str());
    }
    return failures == 0 ? 0 : 1;
}
