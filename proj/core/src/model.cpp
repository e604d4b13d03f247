#include "chartkit/model.hpp"

#include <algorithm>
#include <cmath>

#include "chartkit/errors.hpp"

namespace chartkit {

const char* instrument_name(Instrument instrument)
{
    switch (instrument) {
    case Instrument::Drums:
        return "drums";
    case Instrument::Guitar:
        return "guitar";
    case Instrument::Bass:
        return "bass";
    case Instrument::Vocals:
        return "vocals";
    case Instrument::Keys:
        return "keys";
    }
    throw Error("invalid instrument enum value");
}

Instrument instrument_from_name(const std::string& name)
{
    for (auto instrument : { Instrument::Drums, Instrument::Guitar, Instrument::Bass,
             Instrument::Vocals, Instrument::Keys }) {
        if (name == instrument_name(instrument)) {
            return instrument;
        }
    }
    throw Error("unknown instrument name: " + name);
}

DrumLane make_drum_lane(DrumPad pad, bool cymbal)
{
    if (pad == DrumPad::Kick || pad == DrumPad::Red) {
        cymbal = false;
    }
    return DrumLane { pad, cymbal };
}

Label to_label(DrumLane lane)
{
    return Label { static_cast<int>(lane.pad), lane.cymbal };
}

DrumLane drum_lane_of(Label label)
{
    if (label.value < 0 || label.value > 4) {
        throw Error("label is not a drum lane");
    }
    return make_drum_lane(static_cast<DrumPad>(label.value), label.cymbal);
}

Track Track::normalized(Instrument instrument, std::vector<TimedEvent> events)
{
    std::stable_sort(events.begin(), events.end(),
        [](const TimedEvent& a, const TimedEvent& b) {
            if (a.time != b.time) {
                return a.time < b.time;
            }
            if (a.label != b.label) {
                return a.label < b.label;
            }
            if (a.confidence != b.confidence) {
                return a.confidence > b.confidence;
            }
            return a.sustain > b.sustain;
        });
    auto last = std::unique(events.begin(), events.end(),
        [](const TimedEvent& a, const TimedEvent& b) {
            return a.time == b.time && a.label == b.label;
        });
    events.erase(last, events.end());
    return Track { instrument, std::move(events) };
}

void TempoMap::validate() const
{
    if (segments.empty()) {
        throw Error("tempo map has no segments");
    }
    if (segments.front().start_tick != 0) {
        throw Error("tempo map must start at tick 0");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (segments[i].us_per_quarter <= 0) {
            throw Error("tempo segment has non-positive us_per_quarter");
        }
        if (i > 0 && segments[i].start_tick <= segments[i - 1].start_tick) {
            throw Error("tempo segment start ticks must be strictly increasing");
        }
    }
}

double ticks_to_seconds(const TempoMap& map, int resolution, std::int64_t tick)
{
    map.validate();
    if (resolution <= 0) {
        throw Error("resolution must be positive");
    }
    double seconds = 0.0;
    const auto& segs = map.segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::int64_t seg_start = segs[i].start_tick;
        if (tick <= seg_start) {
            break;
        }
        const std::int64_t seg_end
            = i + 1 < segs.size() ? std::min(segs[i + 1].start_tick, tick) : tick;
        seconds += static_cast<double>(seg_end - seg_start) * segs[i].us_per_quarter
            / (1e6 * resolution);
    }
    return seconds;
}

std::int64_t seconds_to_ticks(const TempoMap& map, int resolution, double seconds)
{
    map.validate();
    if (resolution <= 0) {
        throw Error("resolution must be positive");
    }
    const auto& segs = map.segments;
    double seg_start_seconds = 0.0;
    std::size_t seg = 0;
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
        const double next_start_seconds = seg_start_seconds
            + static_cast<double>(segs[i + 1].start_tick - segs[i].start_tick)
                * segs[i].us_per_quarter / (1e6 * resolution);
        if (next_start_seconds > seconds) {
            break;
        }
        seg_start_seconds = next_start_seconds;
        seg = i + 1;
    }
    const double ticks_into_segment
        = (seconds - seg_start_seconds) * 1e6 * resolution / segs[seg].us_per_quarter;
    return segs[seg].start_tick + std::llround(ticks_into_segment);
}

}
