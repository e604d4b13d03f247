#ifndef CHARTKIT_PREDICTION_HPP
#define CHARTKIT_PREDICTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "chartkit/model.hpp"

namespace chartkit {

// One row of a prediction file. Tab-separated columns:
//   time_s  label  confidence  [sustain_s]  [runner_up_label  runner_up_conf]
// Drum labels: kick, red, yellow_tom, yellow_cym, blue_tom, blue_cym,
// green_tom, green_cym. Fretted instruments use the fret digit 0-4; vocals
// use the MIDI semitone. Lines starting with '#' are comments; a
// "# instrument: <name>" header declares the instrument.
struct PredictionEvent {
    double time = 0.0;
    Label label;
    double confidence = 1.0;
    double sustain = 0.0;
    std::optional<Label> runner_up;
    double runner_up_confidence = 0.0;
};

struct PredictionFile {
    Instrument instrument = Instrument::Drums;
    std::vector<PredictionEvent> events;
};

std::string label_to_string(Instrument instrument, Label label);

// Throws ParseError on a token that is not a label for the instrument.
Label label_from_string(Instrument instrument, const std::string& token);

// The instrument comes from the "# instrument:" header when present, else
// from `fallback`; with neither, throws ParseError. Malformed rows raise
// ParseError naming the line number. Events are sorted by time.
PredictionFile parse_predictions(const std::string& text,
    std::optional<Instrument> fallback = std::nullopt);
PredictionFile load_predictions(const std::string& path,
    std::optional<Instrument> fallback = std::nullopt);

// Deterministic text form, header line included, %.6f numeric formatting.
std::string serialize_predictions(const PredictionFile& predictions);
void save_predictions(const PredictionFile& predictions, const std::string& path);

// Conversions to and from the chart data model (runner-up info is dropped;
// chart events carry confidence 1).
Track to_track(const PredictionFile& predictions);
PredictionFile from_track(const Track& track);

}

#endif
