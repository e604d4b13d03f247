#include "chartkit/correctors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    void ensure_sorted(const std::vector<PredictionEvent>& events)
    {
        const bool sorted = std::is_sorted(events.begin(), events.end(),
            [](const PredictionEvent& a, const PredictionEvent& b) {
                return a.time < b.time;
            });
        if (!sorted) {
            throw Error("corrector input events must be sorted by time");
        }
    }

    bool is_cymbal(const Label& label) { return label.cymbal; }

    bool is_tom(const Label& label)
    {
        return !label.cymbal && label.value >= static_cast<int>(DrumPad::Yellow)
            && label.value <= static_cast<int>(DrumPad::Green);
    }

    double median_of(std::vector<double> values)
    {
        if (values.empty()) {
            throw Error("median of an empty range");
        }
        const std::size_t mid = values.size() / 2;
        std::nth_element(values.begin(), values.begin() + mid, values.end());
        double result = values[mid];
        if (values.size() % 2 == 0) {
            const auto lower = std::max_element(values.begin(), values.begin() + mid);
            result = (result + *lower) / 2.0;
        }
        return result;
    }

    // One directional streak-smoothing sweep; returns whether any label moved.
    bool streak_sweep(std::vector<PredictionEvent>& events, bool forward,
        const CorrectorConfig& config)
    {
        const auto n = static_cast<std::ptrdiff_t>(events.size());
        bool changed = false;
        for (std::ptrdiff_t step = 0; step < n; ++step) {
            const std::ptrdiff_t i = forward ? step : n - 1 - step;
            if (i == 0 || i == n - 1) {
                continue;
            }
            const Label context = events[i - 1].label;
            if (events[i].label == context || events[i + 1].label != context) {
                continue;
            }
            const double gap_before = events[i].time - events[i - 1].time;
            const double gap_after = events[i + 1].time - events[i].time;
            if (gap_before > config.streak_max_gap || gap_after > config.streak_max_gap) {
                continue;
            }
            // An event stacked on a neighbour is a chord member, not a
            // misread interloper in the streak.
            if (gap_before <= config.simultaneity_window
                || gap_after <= config.simultaneity_window) {
                continue;
            }
            int run = 2;  // the two immediate context neighbours
            for (std::ptrdiff_t j = i - 1;
                j > 0 && events[j - 1].label == context
                && events[j].time - events[j - 1].time <= config.streak_max_gap;
                --j) {
                ++run;
            }
            for (std::ptrdiff_t j = i + 1;
                j < n - 1 && events[j + 1].label == context
                && events[j + 1].time - events[j].time <= config.streak_max_gap;
                ++j) {
                ++run;
            }
            if (run >= config.streak_min_run) {
                events[i].label = context;
                changed = true;
            }
        }
        return changed;
    }

}

const std::vector<std::string>& corrector_rule_names()
{
    static const std::vector<std::string> names {
        "arbiter",
        "streak_smooth",
        "roll_veto",
        "costack_veto",
        "kick_floor_tom",
        "fill_rescue",
    };
    return names;
}

void set_rule_enabled(CorrectorConfig& config, const std::string& rule, bool enabled)
{
    if (rule == "arbiter") {
        config.arbiter_enabled = enabled;
    } else if (rule == "streak_smooth") {
        config.streak_smooth_enabled = enabled;
    } else if (rule == "roll_veto") {
        config.roll_veto_enabled = enabled;
    } else if (rule == "costack_veto") {
        config.costack_veto_enabled = enabled;
    } else if (rule == "kick_floor_tom") {
        config.kick_floor_tom_enabled = enabled;
    } else if (rule == "fill_rescue") {
        config.fill_rescue_enabled = enabled;
    } else {
        throw Error("unknown corrector rule: " + rule);
    }
}

StemBandEnergy compute_stem_band_energy(const AudioBuffer& stem,
    const CorrectorConfig& config)
{
    const std::vector<std::pair<double, double>> bands {
        { config.kick_band_lo_hz, config.kick_band_hi_hz },
        { config.snare_band_lo_hz, config.snare_band_hi_hz },
        { config.cymbal_band_lo_hz, config.cymbal_band_hi_hz },
    };
    auto sums = stft_band_sums(stem, bands);
    StemBandEnergy energy;
    energy.kick = std::move(sums[0]);
    energy.snare = std::move(sums[1]);
    energy.cymbal = std::move(sums[2]);
    energy.hop_seconds = static_cast<double>(kStftHopSize) / stem.sample_rate;
    return energy;
}

std::vector<PredictionEvent> arbiter(std::vector<PredictionEvent> events,
    const StemBandEnergy& bands, const CorrectorConfig& config)
{
    ensure_sorted(events);
    if (bands.kick.empty() || bands.snare.size() != bands.kick.size()
        || bands.cymbal.size() != bands.kick.size() || bands.hop_seconds <= 0.0) {
        throw Error("stem band energy is empty or inconsistent");
    }

    const std::size_t frames = bands.kick.size();
    std::vector<double> tom(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        tom[i] = (static_cast<double>(bands.kick[i]) + bands.snare[i]) / 2.0;
    }
    const double kick_median
        = median_of(std::vector<double>(bands.kick.begin(), bands.kick.end()));
    const double snare_median
        = median_of(std::vector<double>(bands.snare.begin(), bands.snare.end()));
    const double cymbal_median
        = median_of(std::vector<double>(bands.cymbal.begin(), bands.cymbal.end()));
    const double tom_median = median_of(tom);

    for (auto& event : events) {
        if (!event.runner_up) {
            continue;
        }
        const auto raw_frame = std::llround(event.time / bands.hop_seconds);
        const auto frame = static_cast<std::size_t>(
            std::clamp<long long>(raw_frame, 0, static_cast<long long>(frames) - 1));

        double local = 0.0;
        double median = 0.0;
        if (event.label.cymbal) {
            local = bands.cymbal[frame];
            median = cymbal_median;
        } else if (event.label.value == static_cast<int>(DrumPad::Kick)) {
            local = bands.kick[frame];
            median = kick_median;
        } else if (event.label.value == static_cast<int>(DrumPad::Red)) {
            local = bands.snare[frame];
            median = snare_median;
        } else {
            local = tom[frame];
            median = tom_median;
        }

        if (local < config.arbiter_energy_fraction * median) {
            event.label = *event.runner_up;
            event.confidence = event.runner_up_confidence;
            event.runner_up.reset();
            event.runner_up_confidence = 0.0;
        }
    }
    return events;
}

std::vector<PredictionEvent> streak_smooth(std::vector<PredictionEvent> events,
    const CorrectorConfig& config)
{
    ensure_sorted(events);
    // Each absorption merges label runs, so repeated sweeps reach a fixed
    // point; without the repeat a relabel late in one sweep could enable an
    // earlier absorption that only the next application would see.
    bool changed = true;
    while (changed) {
        changed = streak_sweep(events, true, config);
        changed = streak_sweep(events, false, config) || changed;
    }
    return events;
}

std::vector<PredictionEvent> roll_veto(std::vector<PredictionEvent> events,
    const CorrectorConfig& config)
{
    ensure_sorted(events);
    const auto is_red = [](const Label& label) {
        return label.value == static_cast<int>(DrumPad::Red);
    };
    const auto is_yellow = [](const Label& label) {
        return label.value == static_cast<int>(DrumPad::Yellow);
    };

    const std::size_t n = events.size();
    // Collapsing a window can expose fresh alternation against the events
    // just past its edge, so rescan until nothing fires. Each collapse
    // removes more label boundaries than it can create, so this terminates.
    bool changed = true;
    while (changed) {
        changed = false;
        std::size_t i = 0;
        while (i < n) {
            if (!is_red(events[i].label) && !is_yellow(events[i].label)) {
                ++i;
                continue;
            }
            // Grow the longest strictly alternating Red/Yellow window from i.
            std::size_t j = i;
            while (j + 1 < n) {
                const Label& a = events[j].label;
                const Label& b = events[j + 1].label;
                const bool alternates
                    = (is_red(a) && is_yellow(b)) || (is_yellow(a) && is_red(b));
                if (!alternates
                    || events[j + 1].time - events[j].time > config.roll_max_ioi) {
                    break;
                }
                ++j;
            }
            const std::size_t length = j - i + 1;
            if (length >= static_cast<std::size_t>(config.roll_min_length)) {
                std::size_t reds = 0;
                std::size_t yellow_cymbals = 0;
                std::size_t yellow_toms = 0;
                for (std::size_t k = i; k <= j; ++k) {
                    if (is_red(events[k].label)) {
                        ++reds;
                    } else if (events[k].label.cymbal) {
                        ++yellow_cymbals;
                    } else {
                        ++yellow_toms;
                    }
                }
                const std::size_t yellows = yellow_cymbals + yellow_toms;
                Label target;
                if (reds >= yellows) {
                    target = to_label(make_drum_lane(DrumPad::Red, false));
                } else {
                    const bool cymbal = yellow_cymbals >= yellow_toms;
                    target = to_label(make_drum_lane(DrumPad::Yellow, cymbal));
                }
                for (std::size_t k = i; k <= j; ++k) {
                    events[k].label = target;
                }
                changed = true;
            }
            i = j + 1;
        }
    }
    return events;
}

std::vector<PredictionEvent> costack_veto(std::vector<PredictionEvent> events,
    const CorrectorConfig& config)
{
    ensure_sorted(events);
    const Label green_cymbal = to_label(make_drum_lane(DrumPad::Green, true));
    const Label blue_cymbal = to_label(make_drum_lane(DrumPad::Blue, true));

    const std::size_t n = events.size();
    std::vector<bool> removed(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (removed[i]
            || (events[i].label != green_cymbal && events[i].label != blue_cymbal)) {
            continue;
        }
        for (std::size_t j = i + 1;
            j < n && events[j].time - events[i].time <= config.simultaneity_window;
            ++j) {
            if (removed[j] || events[j].label == events[i].label
                || (events[j].label != green_cymbal && events[j].label != blue_cymbal)) {
                continue;
            }
            const std::size_t green_index = events[i].label == green_cymbal ? i : j;
            const std::size_t blue_index = green_index == i ? j : i;
            const bool keep_green
                = events[green_index].confidence >= events[blue_index].confidence;
            const std::size_t loser = keep_green ? blue_index : green_index;
            removed[loser] = true;
            if (loser == i) {
                break;
            }
        }
    }

    std::vector<PredictionEvent> kept;
    kept.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!removed[i]) {
            kept.push_back(events[i]);
        }
    }
    return kept;
}

std::vector<PredictionEvent> kick_floor_tom(std::vector<PredictionEvent> events,
    const CorrectorConfig& config)
{
    ensure_sorted(events);
    const Label kick = to_label(make_drum_lane(DrumPad::Kick, false));
    const Label green_tom = to_label(make_drum_lane(DrumPad::Green, false));

    std::vector<double> kick_times;
    for (const auto& event : events) {
        if (event.label == kick) {
            kick_times.push_back(event.time);
        }
    }

    std::vector<PredictionEvent> kept;
    kept.reserve(events.size());
    for (const auto& event : events) {
        if (event.label == green_tom && !kick_times.empty()) {
            const auto it = std::lower_bound(kick_times.begin(), kick_times.end(),
                event.time);
            double nearest = std::numeric_limits<double>::infinity();
            if (it != kick_times.end()) {
                nearest = std::min(nearest, std::abs(*it - event.time));
            }
            if (it != kick_times.begin()) {
                nearest = std::min(nearest, std::abs(*(it - 1) - event.time));
            }
            if (nearest <= config.simultaneity_window) {
                continue;
            }
        }
        kept.push_back(event);
    }
    return kept;
}

std::vector<PredictionEvent> fill_rescue(std::vector<PredictionEvent> events,
    const OnsetEnvelope&, const CorrectorConfig& config)
{
    ensure_sorted(events);
    const std::size_t n = events.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && events[j + 1].time - events[j].time <= config.fill_max_ioi) {
            ++j;
        }
        const std::size_t count = j - i + 1;
        const double span = events[j].time - events[i].time;
        if (count >= static_cast<std::size_t>(config.fill_min_events)
            && span >= config.fill_min_span) {
            DrumPad context = DrumPad::Green;
            bool have_context = false;
            for (std::size_t k = i; k <= j; ++k) {
                Label& label = events[k].label;
                if (is_tom(label)) {
                    context = static_cast<DrumPad>(label.value);
                    have_context = true;
                } else if (is_cymbal(label)
                    && events[k].confidence < config.fill_confidence_gate) {
                    const DrumPad pad = have_context ? context : DrumPad::Green;
                    label = to_label(make_drum_lane(pad, false));
                    context = pad;
                    have_context = true;
                }
            }
        }
        i = j + 1;
    }
    return events;
}

std::vector<PredictionEvent> run_pipeline(std::vector<PredictionEvent> events,
    const CorrectorConfig& config, const OnsetEnvelope* env,
    const StemBandEnergy* bands)
{
    if (config.arbiter_enabled) {
        if (bands == nullptr) {
            throw Error("arbiter is enabled but no stem band energy was given");
        }
        events = arbiter(std::move(events), *bands, config);
    }
    if (config.streak_smooth_enabled) {
        events = streak_smooth(std::move(events), config);
    }
    if (config.roll_veto_enabled) {
        events = roll_veto(std::move(events), config);
    }
    if (config.costack_veto_enabled) {
        events = costack_veto(std::move(events), config);
    }
    if (config.kick_floor_tom_enabled) {
        events = kick_floor_tom(std::move(events), config);
    }
    if (config.fill_rescue_enabled) {
        if (env == nullptr) {
            throw Error("fill_rescue is enabled but no onset envelope was given");
        }
        events = fill_rescue(std::move(events), *env, config);
    }
    return events;
}

}
