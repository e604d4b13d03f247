#include "chartkit/prediction.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    struct DrumToken {
        const char* token;
        DrumLane lane;
    };

    constexpr DrumToken kDrumTokens[] = {
        { "kick", { DrumPad::Kick, false } },
        { "red", { DrumPad::Red, false } },
        { "yellow_tom", { DrumPad::Yellow, false } },
        { "yellow_cym", { DrumPad::Yellow, true } },
        { "blue_tom", { DrumPad::Blue, false } },
        { "blue_cym", { DrumPad::Blue, true } },
        { "green_tom", { DrumPad::Green, false } },
        { "green_cym", { DrumPad::Green, true } },
    };

    double parse_number(const std::string& token, std::size_t line_number)
    {
        std::size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &consumed);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_number) + ": malformed number '"
                + token + "'");
        }
        if (consumed != token.size()) {
            throw ParseError("line " + std::to_string(line_number) + ": malformed number '"
                + token + "'");
        }
        return value;
    }

    std::vector<std::string> split_tabs(const std::string& line)
    {
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                fields.push_back(line.substr(start));
                return fields;
            }
            fields.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
    }

    std::string trimmed(std::string s)
    {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
            s.pop_back();
        }
        std::size_t i = 0;
        while (i < s.size() && s[i] == ' ') {
            ++i;
        }
        return s.substr(i);
    }

    std::string format_number(double value)
    {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.6f", value);
        return buffer;
    }

}

std::string label_to_string(Instrument instrument, Label label)
{
    if (instrument == Instrument::Drums) {
        const DrumLane lane = drum_lane_of(label);
        for (const auto& entry : kDrumTokens) {
            if (entry.lane == lane) {
                return entry.token;
            }
        }
        throw Error("invalid drum label");
    }
    return std::to_string(label.value);
}

Label label_from_string(Instrument instrument, const std::string& token)
{
    if (instrument == Instrument::Drums) {
        for (const auto& entry : kDrumTokens) {
            if (token == entry.token) {
                return to_label(entry.lane);
            }
        }
        throw ParseError("invalid drum label '" + token + "'");
    }
    int value = 0;
    try {
        std::size_t consumed = 0;
        value = std::stoi(token, &consumed);
        if (consumed != token.size()) {
            throw std::invalid_argument(token);
        }
    } catch (const std::exception&) {
        throw ParseError("invalid label '" + token + "'");
    }
    if (instrument == Instrument::Vocals) {
        if (value < 0 || value > 127) {
            throw ParseError("vocal semitone out of range: " + token);
        }
    } else if (value < 0 || value > 4) {
        throw ParseError("fret out of range: " + token);
    }
    return Label { value, false };
}

PredictionFile parse_predictions(const std::string& text, std::optional<Instrument> fallback)
{
    std::optional<Instrument> instrument;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;

    std::istringstream stream(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const std::string clean = trimmed(line);
        if (clean.empty()) {
            continue;
        }
        if (clean[0] == '#') {
            const std::string header = trimmed(clean.substr(1));
            constexpr const char* kInstrumentKey = "instrument:";
            if (header.rfind(kInstrumentKey, 0) == 0) {
                const std::string name = trimmed(header.substr(std::string(kInstrumentKey).size()));
                try {
                    instrument = instrument_from_name(name);
                } catch (const Error&) {
                    throw ParseError("line " + std::to_string(line_number)
                        + ": unknown instrument '" + name + "'");
                }
            }
            continue;
        }
        rows.emplace_back(line_number, split_tabs(clean));
    }

    if (!instrument) {
        instrument = fallback;
    }
    if (!instrument) {
        throw ParseError("prediction file does not declare an instrument");
    }

    PredictionFile out;
    out.instrument = *instrument;
    for (const auto& [row_line, fields] : rows) {
        if (fields.size() < 2 || fields.size() == 5 || fields.size() > 6) {
            throw ParseError("line " + std::to_string(row_line) + ": expected 2-4 or 6 "
                "tab-separated columns, got " + std::to_string(fields.size()));
        }
        PredictionEvent event;
        event.time = parse_number(fields[0], row_line);
        try {
            event.label = label_from_string(*instrument, trimmed(fields[1]));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(row_line) + ": " + e.what());
        }
        if (fields.size() >= 3) {
            event.confidence = parse_number(fields[2], row_line);
        }
        if (fields.size() >= 4) {
            event.sustain = parse_number(fields[3], row_line);
        }
        if (fields.size() == 6) {
            try {
                event.runner_up = label_from_string(*instrument, trimmed(fields[4]));
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(row_line) + ": " + e.what());
            }
            event.runner_up_confidence = parse_number(fields[5], row_line);
        }
        out.events.push_back(event);
    }

    std::stable_sort(out.events.begin(), out.events.end(),
        [](const PredictionEvent& a, const PredictionEvent& b) { return a.time < b.time; });
    return out;
}

PredictionFile load_predictions(const std::string& path, std::optional<Instrument> fallback)
{
    std::ifstream file(path);
    if (!file) {
        throw ParseError("cannot open prediction file: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    try {
        return parse_predictions(buffer.str(), fallback);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_predictions(const PredictionFile& predictions)
{
    std::string out = "# instrument: ";
    out += instrument_name(predictions.instrument);
    out += '\n';
    for (const auto& event : predictions.events) {
        out += format_number(event.time);
        out += '\t';
        out += label_to_string(predictions.instrument, event.label);
        out += '\t';
        out += format_number(event.confidence);
        out += '\t';
        out += format_number(event.sustain);
        if (event.runner_up) {
            out += '\t';
            out += label_to_string(predictions.instrument, *event.runner_up);
            out += '\t';
            out += format_number(event.runner_up_confidence);
        }
        out += '\n';
    }
    return out;
}

void save_predictions(const PredictionFile& predictions, const std::string& path)
{
    std::ofstream file(path);
    if (!file) {
        throw Error("cannot open for writing: " + path);
    }
    file << serialize_predictions(predictions);
}

Track to_track(const PredictionFile& predictions)
{
    std::vector<TimedEvent> events;
    events.reserve(predictions.events.size());
    for (const auto& event : predictions.events) {
        events.push_back(TimedEvent { event.time, event.label, event.sustain,
            event.confidence });
    }
    return Track::normalized(predictions.instrument, std::move(events));
}

PredictionFile from_track(const Track& track)
{
    PredictionFile out;
    out.instrument = track.instrument;
    out.events.reserve(track.events.size());
    for (const auto& event : track.events) {
        PredictionEvent row;
        row.time = event.time;
        row.label = event.label;
        row.confidence = event.confidence;
        row.sustain = event.sustain;
        out.events.push_back(row);
    }
    return out;
}

}
