#ifndef CHARTKIT_TESTS_HELPERS_HPP
#define CHARTKIT_TESTS_HELPERS_HPP

#include <cstdint>
#include <vector>

#include "chartkit/audio.hpp"
#include "chartkit/model.hpp"
#include "chartkit/prediction.hpp"

namespace chartkit::testing {

// Fixture synthesis for the screening regression test. Deliberately avoids
// libm (integer LCG noise, iterated decay multiplication) so the reference
// value in tests/oracles/screen_oracle.py reproduces the statistic exactly.
// Keep both in sync.
inline AudioBuffer screening_fixture_mix()
{
    constexpr int sr = 22050;
    constexpr std::size_t n = 8 * sr;
    AudioBuffer mix;
    mix.sample_rate = sr;
    mix.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mix.samples[i] = static_cast<float>((static_cast<double>(i % 441) / 441.0 - 0.5) * 0.6);
    }
    return mix;
}

inline AudioBuffer screening_fixture_stem()
{
    constexpr int sr = 22050;
    constexpr std::size_t n = 8 * sr;
    AudioBuffer stem;
    stem.sample_rate = sr;
    stem.samples.assign(n, 0.0f);
    std::uint64_t x = 12345;
    for (int k = 0; k < 16; ++k) {
        const std::size_t start = static_cast<std::size_t>(k) * 11025;
        double decay = 1.0;
        for (std::size_t i = 0; i < 2205; ++i) {
            x = (1103515245ULL * x + 12345ULL) % 2147483648ULL;
            const double u = static_cast<double>(x) / 2147483648.0;
            stem.samples[start + i] = static_cast<float>(0.8 * decay * (2.0 * u - 1.0));
            decay *= 0.998;
        }
    }
    return stem;
}

// Click track: a short decaying noise burst at every beat of the given
// tempo. Bursts are broadband, so onset detection finds them reliably.
inline AudioBuffer click_track(double bpm, double seconds,
    double first_beat = 0.05, int sr = 22050)
{
    AudioBuffer audio;
    audio.sample_rate = sr;
    audio.samples.assign(static_cast<std::size_t>(seconds * sr), 0.0f);
    const double period = 60.0 / bpm;
    std::uint64_t x = 99991;
    constexpr std::size_t burst = 160;  // ~7 ms at 22.05 kHz
    for (double t = first_beat; t < seconds; t += period) {
        const std::size_t start = static_cast<std::size_t>(t * sr + 0.5);
        double decay = 1.0;
        for (std::size_t i = 0; i < burst && start + i < audio.samples.size(); ++i) {
            x = (6364136223846793005ULL * x + 1442695040888963407ULL);
            const double u = static_cast<double>(x >> 11) / 9007199254740992.0;
            audio.samples[start + i] = static_cast<float>(0.9 * decay * (2.0 * u - 1.0));
            decay *= 0.96;
        }
    }
    return audio;
}

// Click track that switches tempo at switch_time (beats stay contiguous:
// the first post-switch beat continues from the last pre-switch beat).
inline AudioBuffer click_track_switch(double bpm_a, double bpm_b, double switch_time,
    double seconds, double first_beat = 0.05, int sr = 22050)
{
    AudioBuffer audio;
    audio.sample_rate = sr;
    audio.samples.assign(static_cast<std::size_t>(seconds * sr), 0.0f);
    std::uint64_t x = 77773;
    constexpr std::size_t burst = 160;
    double t = first_beat;
    while (t < seconds) {
        const std::size_t start = static_cast<std::size_t>(t * sr + 0.5);
        double decay = 1.0;
        for (std::size_t i = 0; i < burst && start + i < audio.samples.size(); ++i) {
            x = (6364136223846793005ULL * x + 1442695040888963407ULL);
            const double u = static_cast<double>(x >> 11) / 9007199254740992.0;
            audio.samples[start + i] = static_cast<float>(0.9 * decay * (2.0 * u - 1.0));
            decay *= 0.96;
        }
        t += 60.0 / (t < switch_time ? bpm_a : bpm_b);
    }
    return audio;
}

inline TimedEvent ev(double time, int value, bool cymbal = false, double confidence = 1.0,
    double sustain = 0.0)
{
    TimedEvent e;
    e.time = time;
    e.label = Label { value, cymbal };
    e.confidence = confidence;
    e.sustain = sustain;
    return e;
}

inline PredictionEvent pe(double time, int value, bool cymbal = false,
    double confidence = 1.0)
{
    PredictionEvent e;
    e.time = time;
    e.label = Label { value, cymbal };
    e.confidence = confidence;
    return e;
}

inline PredictionEvent pe_runner(double time, int value, bool cymbal, double confidence,
    int runner_value, bool runner_cymbal, double runner_confidence)
{
    PredictionEvent e = pe(time, value, cymbal, confidence);
    e.runner_up = Label { runner_value, runner_cymbal };
    e.runner_up_confidence = runner_confidence;
    return e;
}

}

#endif
