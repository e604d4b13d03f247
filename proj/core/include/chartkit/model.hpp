#ifndef CHARTKIT_MODEL_HPP
#define CHARTKIT_MODEL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace chartkit {

enum class Instrument { Drums, Guitar, Bass, Vocals, Keys };

const char* instrument_name(Instrument instrument);

// Throws Error on an unrecognised name. Accepted names are the lowercase
// forms returned by instrument_name.
Instrument instrument_from_name(const std::string& name);

enum class DrumPad : int { Kick = 0, Red = 1, Yellow = 2, Blue = 3, Green = 4 };

// Drum class: pad plus cymbal marker. Kick and Red are never cymbals; the
// factory below clears the flag for them.
struct DrumLane {
    DrumPad pad = DrumPad::Kick;
    bool cymbal = false;

    friend bool operator==(const DrumLane&, const DrumLane&) = default;
};

DrumLane make_drum_lane(DrumPad pad, bool cymbal);

// Event class across instruments: drums store the pad index in `value` with
// `cymbal` meaningful for Yellow/Blue/Green; fretted instruments store the
// fret 0-4; vocals store the MIDI semitone.
struct Label {
    int value = 0;
    bool cymbal = false;

    friend bool operator==(const Label&, const Label&) = default;
    friend auto operator<=>(const Label&, const Label&) = default;
};

Label to_label(DrumLane lane);
DrumLane drum_lane_of(Label label);

struct TimedEvent {
    double time = 0.0;     // seconds
    Label label;
    double sustain = 0.0;  // seconds, 0 for percussive hits
    double confidence = 1.0;
};

// Instrument event stream, non-decreasing in time, no duplicate
// (time, label) pairs.
struct Track {
    Instrument instrument = Instrument::Drums;
    std::vector<TimedEvent> events;

    // Sorts and removes duplicate (time, label) pairs, keeping the highest
    // confidence event of each duplicate group. Idempotent.
    static Track normalized(Instrument instrument, std::vector<TimedEvent> events);
};

struct TempoSegment {
    std::int64_t start_tick = 0;
    int us_per_quarter = 500000;
};

struct TimeSignature {
    std::int64_t start_tick = 0;
    int numerator = 4;
    int denominator = 4;
};

// Piecewise-constant tempo. The first segment must start at tick 0 and
// segment start ticks must be strictly increasing; validate() throws Error
// otherwise (also on non-positive tempo values).
struct TempoMap {
    std::vector<TempoSegment> segments { TempoSegment {} };
    std::vector<TimeSignature> time_signatures;

    void validate() const;
};

struct Chart {
    std::map<Instrument, Track> tracks;
    TempoMap tempo_map;
    int resolution = 480;  // ticks per quarter note
};

// Elapsed seconds at an absolute tick under the map. Validates the map.
double ticks_to_seconds(const TempoMap& map, int resolution, std::int64_t tick);

// Inverse of ticks_to_seconds, rounded to the nearest tick; round-trips
// within half a tick.
std::int64_t seconds_to_ticks(const TempoMap& map, int resolution, double seconds);

}

#endif
