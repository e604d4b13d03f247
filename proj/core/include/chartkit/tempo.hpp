#ifndef CHARTKIT_TEMPO_HPP
#define CHARTKIT_TEMPO_HPP

#include <vector>

#include "chartkit/audio.hpp"

namespace chartkit {

inline constexpr double kMinBpm = 60.0;
inline constexpr double kMaxBpm = 200.0;
inline constexpr double kRefineRangeBpm = 5.0;
inline constexpr double kRefineStepBpm = 0.1;
inline constexpr double kTempoChangeThresholdBpm = 3.0;
inline constexpr int kTempoChangeRunBeats = 8;

struct CoherenceResult {
    double r = 0.0;      // resultant length in [0, 1]
    double phase = 0.0;  // mean beat phase in [0, 2*pi)
};

// Weighted resultant of onset phases against a bpm hypothesis:
// theta_i = 2*pi * frac(t_i * bpm / 60), R = |sum w_i e^{i theta_i}| / sum w_i.
// Throws Error on empty input, a negative weight, zero total weight, or a
// non-positive bpm.
CoherenceResult phase_coherence(const std::vector<double>& onset_times,
    const std::vector<double>& weights, double bpm);

// Autocorrelation tempo estimate over 60-200 BPM. Octave disambiguation
// prefers the faster level whenever the half lag carries joint support
// (a clean half-tempo impostor has none); the winning integer lag is then
// refined by parabolic interpolation. Throws Error if the envelope spans
// under 10 s or is all zero.
double estimate_bpm_coarse(const OnsetEnvelope& envelope);

struct TempoEstimate {
    double bpm = 0.0;
    double coherence = 0.0;
    double phase = 0.0;
};

// Maximises phase coherence of the picked peaks (weighted by envelope
// value) over the grid coarse +- 5.0 BPM in 0.1 steps. Ties prefer the bpm
// nearest the coarse estimate, then the lower bpm. Throws Error when no
// peaks exist.
TempoEstimate refine_bpm(const OnsetEnvelope& envelope, double coarse_bpm);

struct TempoChange {
    double time = 0.0;
    double bpm = 0.0;
};

// Scans beat-stepped 8-beat windows (centred, sized by the running
// estimate) and re-estimates the local tempo by iterated refinement seeded
// with the running value. A deviation beyond 3 BPM sustained for 8
// consecutive beats emits a change at the start of the qualifying run, and
// the running estimate switches to the new tempo. Constant-tempo input
// yields an empty list.
std::vector<TempoChange> detect_tempo_changes(const OnsetEnvelope& envelope,
    const TempoEstimate& global);

}

#endif
