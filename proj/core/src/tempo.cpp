#include "chartkit/tempo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    constexpr double kMinEnvelopeSeconds = 10.0;
    constexpr double kHalfLagSupportFraction = 0.4;
    constexpr int kMinWindowPeaks = 3;
    constexpr int kMaxLocalRefineIterations = 5;

    TempoEstimate refine_over_peaks(const std::vector<double>& times,
        const std::vector<double>& weights, double center_bpm)
    {
        const int half_steps
            = static_cast<int>(std::llround(kRefineRangeBpm / kRefineStepBpm));
        TempoEstimate best;
        bool have_best = false;
        for (int k = -half_steps; k <= half_steps; ++k) {
            const double bpm = center_bpm + k * kRefineStepBpm;
            if (bpm <= 0.0) {
                continue;
            }
            const auto coherence = phase_coherence(times, weights, bpm);
            bool better = !have_best;
            if (have_best) {
                if (coherence.r > best.coherence) {
                    better = true;
                } else if (coherence.r == best.coherence) {
                    const double distance = std::abs(bpm - center_bpm);
                    const double best_distance = std::abs(best.bpm - center_bpm);
                    better = distance < best_distance
                        || (distance == best_distance && bpm < best.bpm);
                }
            }
            if (better) {
                best = TempoEstimate { bpm, coherence.r, coherence.phase };
                have_best = true;
            }
        }
        if (!have_best) {
            throw Error("refinement grid is empty");
        }
        return best;
    }

}

CoherenceResult phase_coherence(const std::vector<double>& onset_times,
    const std::vector<double>& weights, double bpm)
{
    if (onset_times.empty()) {
        throw Error("phase coherence needs at least one onset");
    }
    if (onset_times.size() != weights.size()) {
        throw Error("onset and weight counts differ");
    }
    if (!(bpm > 0.0)) {
        throw Error("bpm must be positive");
    }

    double sum_cos = 0.0;
    double sum_sin = 0.0;
    double total_weight = 0.0;
    for (std::size_t i = 0; i < onset_times.size(); ++i) {
        if (weights[i] < 0.0) {
            throw Error("weights must be non-negative");
        }
        const double beats = onset_times[i] * bpm / 60.0;
        const double theta = 2.0 * std::numbers::pi * (beats - std::floor(beats));
        sum_cos += weights[i] * std::cos(theta);
        sum_sin += weights[i] * std::sin(theta);
        total_weight += weights[i];
    }
    if (!(total_weight > 0.0)) {
        throw Error("total weight must be positive");
    }

    CoherenceResult result;
    result.r = std::min(1.0, std::hypot(sum_cos, sum_sin) / total_weight);
    result.phase = std::atan2(sum_sin, sum_cos);
    if (result.phase < 0.0) {
        result.phase += 2.0 * std::numbers::pi;
    }
    return result;
}

double estimate_bpm_coarse(const OnsetEnvelope& envelope)
{
    const auto& v = envelope.values;
    if (v.size() * envelope.hop_seconds < kMinEnvelopeSeconds) {
        throw Error("envelope must span at least 10 s");
    }
    if (std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; })) {
        throw Error("envelope has no rhythmic content");
    }

    const int min_lag
        = static_cast<int>(std::ceil(60.0 / (kMaxBpm * envelope.hop_seconds)));
    const int max_lag
        = static_cast<int>(std::floor(60.0 / (kMinBpm * envelope.hop_seconds)));
    const int ac_limit = std::min(static_cast<int>(v.size()) - 1, 2 * max_lag + 2);
    if (ac_limit < max_lag) {
        throw Error("envelope too short for the tempo search range");
    }

    std::vector<double> ac(ac_limit + 1, 0.0);
    for (int lag = 1; lag <= ac_limit; ++lag) {
        double sum = 0.0;
        for (std::size_t i = 0; i + lag < v.size(); ++i) {
            sum += static_cast<double>(v[i]) * v[i + lag];
        }
        ac[lag] = sum;
    }

    int lag = min_lag;
    for (int candidate = min_lag; candidate <= max_lag; ++candidate) {
        if (ac[candidate] > ac[lag]) {
            lag = candidate;
        }
    }

    // Octave disambiguation: a half-tempo impostor shows support at its half
    // lag (the true beat level), while a true beat level has none below it.
    // The half-lag mass can split across two integer lags, hence the
    // neighbourhood max and the permissive threshold.
    while (true) {
        const double half = lag / 2.0;
        const int half_center = static_cast<int>(std::llround(half));
        if (half < min_lag - 0.5 || half_center - 1 < 1) {
            break;
        }
        int best_half = half_center;
        for (int c = half_center - 1; c <= half_center + 1; ++c) {
            if (c >= 1 && c <= ac_limit && ac[c] > ac[best_half]) {
                best_half = c;
            }
        }
        if (ac[best_half] >= kHalfLagSupportFraction * ac[lag]) {
            lag = best_half;
        } else {
            break;
        }
    }

    double vertex = 0.0;
    if (lag - 1 >= 1 && lag + 1 <= ac_limit) {
        const double a = ac[lag - 1];
        const double b = ac[lag];
        const double c = ac[lag + 1];
        const double denominator = a - 2.0 * b + c;
        if (denominator != 0.0) {
            vertex = std::clamp(0.5 * (a - c) / denominator, -1.0, 1.0);
        }
    }

    const double bpm = 60.0 / ((lag + vertex) * envelope.hop_seconds);
    return std::clamp(bpm, kMinBpm, kMaxBpm);
}

TempoEstimate refine_bpm(const OnsetEnvelope& envelope, double coarse_bpm)
{
    const auto peaks = pick_peaks(envelope);
    if (peaks.empty()) {
        throw Error("no onset peaks to refine against");
    }
    std::vector<double> times;
    std::vector<double> weights;
    times.reserve(peaks.size());
    weights.reserve(peaks.size());
    for (const auto& peak : peaks) {
        times.push_back(peak.time);
        weights.push_back(peak.weight);
    }
    return refine_over_peaks(times, weights, coarse_bpm);
}

std::vector<TempoChange> detect_tempo_changes(const OnsetEnvelope& envelope,
    const TempoEstimate& global)
{
    if (!(global.bpm > 0.0)) {
        throw Error("global bpm must be positive");
    }

    const auto peaks = pick_peaks(envelope);
    std::vector<double> peak_times;
    std::vector<double> peak_weights;
    peak_times.reserve(peaks.size());
    peak_weights.reserve(peaks.size());
    for (const auto& peak : peaks) {
        peak_times.push_back(peak.time);
        peak_weights.push_back(peak.weight);
    }

    const double envelope_end = envelope.values.empty()
        ? envelope.start_time
        : envelope.time_at(envelope.values.size() - 1);

    std::vector<TempoChange> changes;
    double running = global.bpm;
    bool run_active = false;
    double run_start = 0.0;
    int run_beats = 0;

    double beat = 60.0 / running;
    double t = envelope.start_time + kTempoChangeRunBeats / 2.0 * beat;
    while (true) {
        beat = 60.0 / running;
        const double window_lo = t - kTempoChangeRunBeats / 2.0 * beat;
        const double window_hi = t + kTempoChangeRunBeats / 2.0 * beat;
        if (window_hi > envelope_end) {
            break;
        }

        const auto lo_it
            = std::lower_bound(peak_times.begin(), peak_times.end(), window_lo);
        const auto hi_it
            = std::lower_bound(peak_times.begin(), peak_times.end(), window_hi);
        const auto lo = static_cast<std::size_t>(lo_it - peak_times.begin());
        const auto hi = static_cast<std::size_t>(hi_it - peak_times.begin());

        bool deviating = false;
        double local = running;
        if (hi - lo >= static_cast<std::size_t>(kMinWindowPeaks)) {
            const std::vector<double> times(peak_times.begin() + lo,
                peak_times.begin() + hi);
            const std::vector<double> weights(peak_weights.begin() + lo,
                peak_weights.begin() + hi);
            // Iterate so tempo jumps beyond the +-5 refine radius settle.
            for (int iteration = 0; iteration < kMaxLocalRefineIterations; ++iteration) {
                const auto estimate = refine_over_peaks(times, weights, local);
                const bool settled = std::abs(estimate.bpm - local) < kRefineStepBpm / 2.0;
                local = estimate.bpm;
                if (settled) {
                    break;
                }
            }
            deviating = std::abs(local - running) > kTempoChangeThresholdBpm;
        }

        if (deviating) {
            if (!run_active) {
                run_active = true;
                run_start = t;
                run_beats = 0;
            }
            ++run_beats;
            if (run_beats >= kTempoChangeRunBeats) {
                changes.push_back(TempoChange { run_start, local });
                running = local;
                run_active = false;
                run_beats = 0;
            }
        } else {
            run_active = false;
            run_beats = 0;
        }

        t += 60.0 / running;
    }
    return changes;
}

}
