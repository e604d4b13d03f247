#include "chartkit/lane_map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    constexpr double kMinPitch = 24.0;
    constexpr double kMaxPitch = 96.0;

    // Diatonic degree of each semitone offset above the tonic; chromatic
    // neighbours share the lower degree.
    constexpr std::array<int, 12> kScalePosition { 0, 0, 1, 1, 2, 3, 3, 4, 4, 5, 5, 6 };

    void validate_notes(const std::vector<PitchedNote>& notes)
    {
        for (const auto& note : notes) {
            if (!(note.midi_pitch >= kMinPitch && note.midi_pitch <= kMaxPitch)) {
                throw Error("pitch out of range [24, 96]");
            }
            if (note.duration < 0.0) {
                throw Error("note duration must be non-negative");
            }
        }
        const bool sorted = std::is_sorted(notes.begin(), notes.end(),
            [](const PitchedNote& a, const PitchedNote& b) { return a.time < b.time; });
        if (!sorted) {
            throw Error("pitched notes must be sorted by time");
        }
    }

    int pitch_class(double midi_pitch)
    {
        const auto rounded = static_cast<int>(std::llround(midi_pitch));
        return ((rounded % 12) + 12) % 12;
    }

    int histogram_argmax(const std::array<double, 12>& histogram)
    {
        int best = 0;
        for (int pc = 1; pc < 12; ++pc) {
            if (histogram[pc] > histogram[best]) {
                best = pc;
            }
        }
        return best;
    }

}

std::vector<int> running_tonic(const std::vector<PitchedNote>& notes, int window)
{
    if (window <= 0) {
        throw Error("tonic window must be positive");
    }
    validate_notes(notes);

    const std::size_t n = notes.size();
    std::vector<int> tonics(n, 0);
    if (n == 0) {
        return tonics;
    }

    const std::size_t w = static_cast<std::size_t>(window);
    // Recomputed per note rather than slid: subtracting weights back out
    // drifts in floating point, and the lower-class tie rule is sensitive
    // to exact equality. The window is small, so this stays cheap.
    const auto window_tonic = [&](std::size_t first, std::size_t last) {
        std::array<double, 12> histogram {};
        for (std::size_t i = first; i <= last; ++i) {
            histogram[pitch_class(notes[i].midi_pitch)] += notes[i].duration;
        }
        return histogram_argmax(histogram);
    };

    const int seed_tonic = window_tonic(0, std::min(n, w) - 1);
    for (std::size_t i = 0; i < n; ++i) {
        tonics[i] = i < w ? seed_tonic : window_tonic(i - w + 1, i);
    }
    return tonics;
}

std::vector<TimedEvent> map_to_lanes(const std::vector<PitchedNote>& notes,
    const std::vector<int>& tonics)
{
    validate_notes(notes);
    if (notes.size() != tonics.size()) {
        throw Error("note and tonic counts differ");
    }
    for (const int tonic : tonics) {
        if (tonic < 0 || tonic > 11) {
            throw Error("tonic must be a pitch class 0-11");
        }
    }

    std::vector<TimedEvent> events(notes.size());
    for (std::size_t i = 0; i < notes.size(); ++i) {
        const auto rounded = static_cast<int>(std::llround(notes[i].midi_pitch));
        const int offset = ((rounded - tonics[i]) % 12 + 12) % 12;
        const int fret
            = std::clamp(kScalePosition[static_cast<std::size_t>(offset)] * 5 / 7, 0, 4);
        events[i].time = notes[i].time;
        events[i].label = Label { fret, false };
        events[i].sustain = notes[i].duration;
        events[i].confidence = 1.0;
    }

    // Fret motion must follow pitch motion, and repeated pitches must not
    // wander across frets when the tonic estimate drifts between them.
    for (std::size_t i = 1; i < notes.size(); ++i) {
        const int previous = events[i - 1].label.value;
        if (notes[i].midi_pitch > notes[i - 1].midi_pitch) {
            events[i].label.value = std::max(events[i].label.value, previous);
        } else if (notes[i].midi_pitch < notes[i - 1].midi_pitch) {
            events[i].label.value = std::min(events[i].label.value, previous);
        } else {
            events[i].label.value = previous;
        }
    }
    return events;
}

std::vector<PitchedNote> parse_pitched_notes(const std::string& text)
{
    std::vector<PitchedNote> notes;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }

        std::vector<std::string> columns;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            columns.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) {
                break;
            }
            start = tab + 1;
        }
        if (columns.size() < 2 || columns.size() > 4) {
            throw ParseError("line " + std::to_string(line_number)
                + ": expected 2-4 tab-separated columns");
        }

        const auto parse_number = [&](const std::string& token, const char* what) {
            try {
                std::size_t used = 0;
                const double value = std::stod(token, &used);
                if (used != token.size()) {
                    throw std::invalid_argument(what);
                }
                return value;
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(line_number) + ": bad "
                    + std::string(what) + " '" + token + "'");
            }
        };

        PitchedNote note;
        note.time = parse_number(columns[0], "time");
        note.midi_pitch = parse_number(columns[1], "pitch");
        if (columns.size() >= 3) {
            parse_number(columns[2], "confidence");
        }
        if (columns.size() == 4) {
            note.duration = parse_number(columns[3], "duration");
        }
        if (!(note.midi_pitch >= kMinPitch && note.midi_pitch <= kMaxPitch)) {
            throw ParseError("line " + std::to_string(line_number)
                + ": pitch out of range [24, 96]");
        }
        if (note.duration < 0.0) {
            throw ParseError("line " + std::to_string(line_number)
                + ": negative duration");
        }
        notes.push_back(note);
    }
    std::stable_sort(notes.begin(), notes.end(),
        [](const PitchedNote& a, const PitchedNote& b) { return a.time < b.time; });
    return notes;
}

std::vector<PitchedNote> load_pitched_notes(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot open pitched-note file: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_pitched_notes(buffer.str());
}

}
