#ifndef CHARTKIT_MIDI_HPP
#define CHARTKIT_MIDI_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chartkit/model.hpp"

namespace chartkit {

struct ParsedChart {
    Chart chart;
    std::vector<std::string> warnings;
};

// Standard MIDI file (format 0 or 1) to Chart. Tracks are recognised by
// their name meta event (PART DRUMS, PART GUITAR, PART BASS, PART VOCALS,
// PART KEYS); unrecognised named tracks are skipped and reported in
// warnings. Note decoding (Expert difficulty):
//   drums  96-100 -> Kick/Red/Yellow/Blue/Green, tom markers 110/111/112
//          mark Yellow/Blue/Green as toms while active (cymbal otherwise)
//   guitar/bass/keys 96-100 -> frets 0-4
//   vocals: every note's pitch is the semitone label
// Tick times are converted to seconds with the embedded tempo map; note
// lengths under 1/12 beat parse as sustain 0. Throws ParseError (with byte
// offset) on malformed input.
ParsedChart parse_chart_midi(const std::uint8_t* data, std::size_t size);
ParsedChart parse_chart_midi_file(const std::string& path);

// Chart to format-1 SMF bytes: tempo/time-signature track first, then one
// named track per instrument in fixed order. Event times are quantised to
// the nearest tick; zero-sustain events are emitted as resolution/24-tick
// notes so that players accept them while parse still reads sustain 0.
// Output is a pure function of the chart (byte-identical across runs).
// Throws Error if any event lands outside the representable tick range.
std::vector<std::uint8_t> emit_chart_midi(const Chart& chart);
void write_chart_midi_file(const Chart& chart, const std::string& path);

}

#endif
