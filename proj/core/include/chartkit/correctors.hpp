#ifndef CHARTKIT_CORRECTORS_HPP
#define CHARTKIT_CORRECTORS_HPP

#include <string>
#include <vector>

#include "chartkit/audio.hpp"
#include "chartkit/prediction.hpp"

namespace chartkit {

// Parameters and per-rule enable flags for the drum post-processing stack.
// Defaults are frozen; identical inputs always yield identical output.
struct CorrectorConfig {
    bool arbiter_enabled = true;
    bool streak_smooth_enabled = true;
    bool roll_veto_enabled = true;
    bool costack_veto_enabled = true;
    bool kick_floor_tom_enabled = true;
    bool fill_rescue_enabled = true;

    double simultaneity_window = 0.025;    // coincidence tolerance, seconds
    int streak_min_run = 4;                // surrounding same-label events needed
    double streak_max_gap = 0.180;         // max IOI inside a streak, seconds
    double roll_max_ioi = 0.120;           // max IOI of an alternating roll
    int roll_min_length = 6;               // events needed to call it a roll
    int fill_min_events = 6;
    double fill_max_ioi = 0.130;
    double fill_min_span = 0.5;            // seconds, first event to last
    double fill_confidence_gate = 0.5;     // cymbals below this are re-labelled
    double arbiter_energy_fraction = 0.1;  // of the band's song-wide median

    double kick_band_lo_hz = 40.0;
    double kick_band_hi_hz = 120.0;
    double snare_band_lo_hz = 150.0;
    double snare_band_hi_hz = 400.0;
    double cymbal_band_lo_hz = 6000.0;
    double cymbal_band_hi_hz = 12000.0;
};

// Rule names in pipeline application order.
const std::vector<std::string>& corrector_rule_names();

// Flips one rule's enable flag by name. Throws Error on an unknown name.
void set_rule_enabled(CorrectorConfig& config, const std::string& rule, bool enabled);

// Per-frame magnitude sums of the drum stem in the kick, snare and cymbal
// bands, sharing the onset-envelope frame timing (frame k at k * hop).
struct StemBandEnergy {
    std::vector<float> kick;
    std::vector<float> snare;
    std::vector<float> cymbal;
    double hop_seconds = 0.0;
};

StemBandEnergy compute_stem_band_energy(const AudioBuffer& stem,
    const CorrectorConfig& config);

// All rules below take a drum event stream sorted by time and return the
// corrected stream. Every rule keeps or removes events (never inserts),
// leaves all timestamps untouched, and is idempotent. Inputs that are not
// time-sorted raise Error.

// Replaces an event's label with its runner-up when the band matching the
// predicted label (kick, snare, cymbal, or the kick/snare average for toms)
// is quieter than arbiter_energy_fraction times that band's song-wide median
// at the event's frame. Events without a runner-up pass through; a replaced
// event's confidence becomes the runner-up confidence and its runner-up slot
// is cleared.
std::vector<PredictionEvent> arbiter(std::vector<PredictionEvent> events,
    const StemBandEnergy& bands, const CorrectorConfig& config);

// Absorbs a single interloper into a surrounding streak: when at least
// streak_min_run same-label events at IOI <= streak_max_gap surround one
// event of a different label, that event takes the streak's label. Events
// stacked within simultaneity_window of a neighbour are chord members, not
// interlopers, and are never absorbed. Forward then backward scans repeat
// until nothing changes.
std::vector<PredictionEvent> streak_smooth(std::vector<PredictionEvent> events,
    const CorrectorConfig& config);

// Collapses fast strict Red/Yellow alternation (IOI <= roll_max_ioi, at
// least roll_min_length events) onto the majority pad; the pad-count tie
// goes to Red. A Yellow majority relabels Reds to the window's most common
// Yellow label (tie: the cymbal form).
std::vector<PredictionEvent> roll_veto(std::vector<PredictionEvent> events,
    const CorrectorConfig& config);

// Where a Green cymbal and a Blue cymbal land within simultaneity_window of
// each other, only the higher-confidence one survives (tie keeps Green).
std::vector<PredictionEvent> costack_veto(std::vector<PredictionEvent> events,
    const CorrectorConfig& config);

// A Green tom within simultaneity_window of a Kick is dropped; the kick
// alone stands.
std::vector<PredictionEvent> kick_floor_tom(std::vector<PredictionEvent> events,
    const CorrectorConfig& config);

// Inside a fill - at least fill_min_events consecutive events at IOI <=
// fill_max_ioi spanning at least fill_min_span seconds - cymbal events with
// confidence below fill_confidence_gate become toms on the pad of the
// nearest preceding tom in the fill (Green when none precedes). The
// envelope parameter keeps the audio context in the signature for callers;
// detection itself is event-driven.
std::vector<PredictionEvent> fill_rescue(std::vector<PredictionEvent> events,
    const OnsetEnvelope& env, const CorrectorConfig& config);

// Applies the enabled rules in the fixed order: arbiter, streak_smooth,
// roll_veto, costack_veto, kick_floor_tom, fill_rescue. Disabled rules are
// identity. `env` may be null unless fill_rescue is enabled; `bands` may be
// null unless arbiter is enabled (Error otherwise).
std::vector<PredictionEvent> run_pipeline(std::vector<PredictionEvent> events,
    const CorrectorConfig& config, const OnsetEnvelope* env,
    const StemBandEnergy* bands);

}

#endif
