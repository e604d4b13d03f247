#ifndef CHARTKIT_LANE_MAP_HPP
#define CHARTKIT_LANE_MAP_HPP

#include <string>
#include <vector>

#include "chartkit/model.hpp"

namespace chartkit {

// One segmented note of a monophonic pitch contour.
struct PitchedNote {
    double time = 0.0;        // seconds
    double midi_pitch = 60.0; // fractional semitones allowed, in [24, 96]
    double duration = 0.0;    // seconds
};

inline constexpr int kTonicWindowNotes = 16;

// Per-note tonic pitch class (0-11): the argmax of the duration-weighted
// pitch-class histogram over the trailing `window` notes, ties to the lower
// class. Notes before a full window share the histogram of the first
// `window` notes. Empty input gives an empty result.
std::vector<int> running_tonic(const std::vector<PitchedNote>& notes,
    int window = kTonicWindowNotes);

// Maps each note to a fret 0-4. The semitone offset above the nearest tonic
// at or below the rounded pitch selects a diatonic degree (chromatic
// neighbours share the lower degree), which spreads across the five frets.
// A post-pass keeps equal consecutive pitches on equal frets and makes fret
// movement follow pitch direction. Times and sustains pass through; the
// result has one event per note, confidence 1.
std::vector<TimedEvent> map_to_lanes(const std::vector<PitchedNote>& notes,
    const std::vector<int>& tonics);

// Tab-separated pitched-note rows: time, pitch, then optional confidence
// (ignored) and duration columns. '#' lines are comments. Notes are sorted
// by time; malformed rows raise ParseError with the line number.
std::vector<PitchedNote> parse_pitched_notes(const std::string& text);
std::vector<PitchedNote> load_pitched_notes(const std::string& path);

}

#endif
