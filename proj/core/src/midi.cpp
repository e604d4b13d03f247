#include "chartkit/midi.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    constexpr int kNoteOnId = 0x90;
    constexpr int kNoteOffId = 0x80;
    constexpr int kMetaEventId = 0xFF;
    constexpr int kTrackNameMetaId = 0x03;
    constexpr int kEndOfTrackMetaId = 0x2F;
    constexpr int kSetTempoMetaId = 0x51;
    constexpr int kTimeSignatureMetaId = 0x58;

    constexpr int kExpertNoteBase = 96;   // drums: Kick..Green, five-fret: fret 0..4
    constexpr int kTomMarkerBase = 110;   // 110/111/112 -> Yellow/Blue/Green toms
    constexpr std::int64_t kMaxTick = 0x0FFFFFFF;
    constexpr int kDefaultUsPerQuarter = 500000;
    constexpr int kEmitVelocity = 100;
    constexpr int kEmitOffVelocity = 64;

    const std::map<std::string, Instrument>& track_name_map()
    {
        static const std::map<std::string, Instrument> names {
            { "PART DRUMS", Instrument::Drums },
            { "PART GUITAR", Instrument::Guitar },
            { "PART BASS", Instrument::Bass },
            { "PART VOCALS", Instrument::Vocals },
            { "PART KEYS", Instrument::Keys },
        };
        return names;
    }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& message)
    {
        throw ParseError("byte " + std::to_string(offset) + ": " + message);
    }

    class ByteReader {
    public:
        ByteReader(const std::uint8_t* data, std::size_t size)
            : m_data(data)
            , m_size(size)
        {
        }

        std::size_t offset() const { return m_pos; }
        bool at_end() const { return m_pos >= m_size; }

        std::uint8_t read_u8()
        {
            if (m_pos >= m_size) {
                fail_at(m_pos, "unexpected end of file");
            }
            return m_data[m_pos++];
        }

        std::uint8_t peek_u8() const
        {
            if (m_pos >= m_size) {
                fail_at(m_pos, "unexpected end of file");
            }
            return m_data[m_pos];
        }

        std::uint32_t read_u16be() { return (read_u8() << 8) | read_u8(); }

        std::uint32_t read_u32be()
        {
            std::uint32_t v = 0;
            for (int i = 0; i < 4; ++i) {
                v = (v << 8) | read_u8();
            }
            return v;
        }

        std::uint32_t read_vlq()
        {
            std::uint32_t value = 0;
            for (int i = 0; i < 4; ++i) {
                const std::uint8_t byte = read_u8();
                value = (value << 7) | (byte & 0x7F);
                if ((byte & 0x80) == 0) {
                    return value;
                }
            }
            fail_at(m_pos, "variable-length quantity longer than 4 bytes");
        }

        void skip(std::size_t n)
        {
            if (m_pos + n > m_size) {
                fail_at(m_pos, "unexpected end of file");
            }
            m_pos += n;
        }

        std::string read_string(std::size_t n)
        {
            if (m_pos + n > m_size) {
                fail_at(m_pos, "unexpected end of file");
            }
            std::string s(reinterpret_cast<const char*>(m_data + m_pos), n);
            m_pos += n;
            return s;
        }

    private:
        const std::uint8_t* m_data;
        std::size_t m_size;
        std::size_t m_pos = 0;
    };

    struct RawNote {
        std::int64_t on_tick = 0;
        std::int64_t off_tick = 0;
        int pitch = 0;
    };

    struct RawTrack {
        std::optional<std::string> name;
        std::vector<RawNote> notes;
        std::vector<TempoSegment> tempos;
        std::vector<TimeSignature> time_signatures;
        std::int64_t end_tick = 0;
    };

    RawTrack parse_track(ByteReader& reader)
    {
        const std::size_t chunk_start = reader.offset();
        if (reader.read_string(4) != "MTrk") {
            fail_at(chunk_start, "expected MTrk chunk");
        }
        const std::uint32_t length = reader.read_u32be();
        const std::size_t track_end = reader.offset() + length;

        RawTrack track;
        std::map<int, std::vector<std::int64_t>> open_notes;
        std::int64_t tick = 0;
        int running_status = 0;
        bool saw_end = false;

        while (reader.offset() < track_end && !saw_end) {
            tick += reader.read_vlq();
            int status = reader.peek_u8();
            if (status & 0x80) {
                reader.read_u8();
                if (status < 0xF0) {
                    running_status = status;
                }
            } else {
                if (running_status == 0) {
                    fail_at(reader.offset(), "data byte with no running status");
                }
                status = running_status;
            }

            if (status == kMetaEventId) {
                const int type = reader.read_u8();
                const std::uint32_t len = reader.read_vlq();
                const std::size_t data_at = reader.offset();
                if (type == kTrackNameMetaId) {
                    const std::string name = reader.read_string(len);
                    if (!track.name) {
                        track.name = name;
                    }
                } else if (type == kSetTempoMetaId) {
                    if (len != 3) {
                        fail_at(data_at, "set-tempo meta event must have 3 data bytes");
                    }
                    const int us = (reader.read_u8() << 16) | (reader.read_u8() << 8)
                        | reader.read_u8();
                    track.tempos.push_back(TempoSegment { tick, us });
                } else if (type == kTimeSignatureMetaId) {
                    if (len < 2) {
                        fail_at(data_at, "time-signature meta event too short");
                    }
                    const int numerator = reader.read_u8();
                    const int denom_log2 = reader.read_u8();
                    reader.skip(len - 2);
                    track.time_signatures.push_back(
                        TimeSignature { tick, numerator, 1 << denom_log2 });
                } else if (type == kEndOfTrackMetaId) {
                    reader.skip(len);
                    saw_end = true;
                } else {
                    reader.skip(len);
                }
            } else if (status == 0xF0 || status == 0xF7) {
                reader.skip(reader.read_vlq());
            } else {
                const int kind = status & 0xF0;
                const int data1 = reader.read_u8();
                int data2 = 0;
                if (kind != 0xC0 && kind != 0xD0) {
                    data2 = reader.read_u8();
                }
                if (kind == kNoteOnId && data2 > 0) {
                    open_notes[data1].push_back(tick);
                } else if (kind == kNoteOffId || (kind == kNoteOnId && data2 == 0)) {
                    auto it = open_notes.find(data1);
                    if (it != open_notes.end() && !it->second.empty()) {
                        track.notes.push_back(RawNote { it->second.front(), tick, data1 });
                        it->second.erase(it->second.begin());
                    }
                }
            }
        }

        track.end_tick = tick;
        // Close any note still sounding at end of track.
        for (auto& [pitch, ons] : open_notes) {
            for (std::int64_t on : ons) {
                track.notes.push_back(RawNote { on, tick, pitch });
            }
        }
        std::sort(track.notes.begin(), track.notes.end(),
            [](const RawNote& a, const RawNote& b) {
                return std::tie(a.on_tick, a.pitch) < std::tie(b.on_tick, b.pitch);
            });

        if (reader.offset() != track_end) {
            if (reader.offset() > track_end) {
                fail_at(chunk_start, "track events run past the chunk length");
            }
            reader.skip(track_end - reader.offset());
        }
        return track;
    }

    bool tom_marker_covers(const std::vector<RawNote>& markers, int marker_pitch,
        std::int64_t tick)
    {
        for (const auto& marker : markers) {
            if (marker.pitch == marker_pitch && marker.on_tick <= tick
                && tick < marker.off_tick) {
                return true;
            }
        }
        return false;
    }

    TempoMap build_tempo_map(std::vector<TempoSegment> tempos,
        std::vector<TimeSignature> signatures)
    {
        std::stable_sort(tempos.begin(), tempos.end(),
            [](const TempoSegment& a, const TempoSegment& b) {
                return a.start_tick < b.start_tick;
            });
        TempoMap map;
        map.segments.clear();
        for (const auto& tempo : tempos) {
            if (!map.segments.empty() && map.segments.back().start_tick == tempo.start_tick) {
                map.segments.back() = tempo;
            } else {
                map.segments.push_back(tempo);
            }
        }
        if (map.segments.empty() || map.segments.front().start_tick != 0) {
            map.segments.insert(map.segments.begin(),
                TempoSegment { 0, kDefaultUsPerQuarter });
        }
        std::stable_sort(signatures.begin(), signatures.end(),
            [](const TimeSignature& a, const TimeSignature& b) {
                return a.start_tick < b.start_tick;
            });
        map.time_signatures = std::move(signatures);
        return map;
    }

    Track decode_instrument_track(Instrument instrument, const RawTrack& raw,
        const TempoMap& tempo_map, int resolution)
    {
        const std::int64_t min_sustain_ticks = std::max<std::int64_t>(resolution / 12, 2);
        std::vector<TimedEvent> events;
        for (const auto& note : raw.notes) {
            Label label;
            if (instrument == Instrument::Vocals) {
                label = Label { note.pitch, false };
            } else if (note.pitch >= kExpertNoteBase && note.pitch <= kExpertNoteBase + 4) {
                const int index = note.pitch - kExpertNoteBase;
                if (instrument == Instrument::Drums) {
                    const auto pad = static_cast<DrumPad>(index);
                    bool cymbal = false;
                    if (pad == DrumPad::Yellow || pad == DrumPad::Blue
                        || pad == DrumPad::Green) {
                        cymbal = !tom_marker_covers(raw.notes, kTomMarkerBase + index - 2,
                            note.on_tick);
                    }
                    label = to_label(make_drum_lane(pad, cymbal));
                } else {
                    label = Label { index, false };
                }
            } else {
                continue;  // other difficulties and markers
            }

            TimedEvent event;
            event.time = ticks_to_seconds(tempo_map, resolution, note.on_tick);
            event.label = label;
            if (note.off_tick - note.on_tick >= min_sustain_ticks) {
                event.sustain
                    = ticks_to_seconds(tempo_map, resolution, note.off_tick) - event.time;
            }
            events.push_back(event);
        }
        return Track::normalized(instrument, std::move(events));
    }

}

ParsedChart parse_chart_midi(const std::uint8_t* data, std::size_t size)
{
    ByteReader reader(data, size);
    if (reader.read_string(4) != "MThd") {
        fail_at(0, "expected MThd header");
    }
    if (reader.read_u32be() != 6) {
        fail_at(4, "MThd chunk must be 6 bytes");
    }
    const std::uint32_t format = reader.read_u16be();
    if (format > 1) {
        fail_at(8, "unsupported MIDI format " + std::to_string(format));
    }
    const std::uint32_t num_tracks = reader.read_u16be();
    const std::uint32_t division = reader.read_u16be();
    if (division & 0x8000) {
        fail_at(12, "SMPTE division is not supported");
    }
    if (division == 0) {
        fail_at(12, "division must be positive");
    }

    std::vector<RawTrack> raw_tracks;
    raw_tracks.reserve(num_tracks);
    for (std::uint32_t i = 0; i < num_tracks; ++i) {
        raw_tracks.push_back(parse_track(reader));
    }

    std::vector<TempoSegment> tempos;
    std::vector<TimeSignature> signatures;
    for (const auto& raw : raw_tracks) {
        tempos.insert(tempos.end(), raw.tempos.begin(), raw.tempos.end());
        signatures.insert(signatures.end(), raw.time_signatures.begin(),
            raw.time_signatures.end());
    }

    ParsedChart result;
    result.chart.resolution = static_cast<int>(division);
    result.chart.tempo_map = build_tempo_map(std::move(tempos), std::move(signatures));
    result.chart.tempo_map.validate();

    for (const auto& raw : raw_tracks) {
        if (!raw.name) {
            continue;  // tempo/conductor track
        }
        const auto it = track_name_map().find(*raw.name);
        if (it == track_name_map().end()) {
            result.warnings.push_back("ignored unknown track: " + *raw.name);
            continue;
        }
        if (result.chart.tracks.count(it->second) != 0) {
            result.warnings.push_back("ignored duplicate track: " + *raw.name);
            continue;
        }
        result.chart.tracks[it->second] = decode_instrument_track(it->second, raw,
            result.chart.tempo_map, result.chart.resolution);
    }
    return result;
}

ParsedChart parse_chart_midi_file(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw ParseError("cannot open MIDI file: " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
        std::istreambuf_iterator<char>());
    try {
        return parse_chart_midi(bytes.data(), bytes.size());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

    struct TrackEvent {
        std::int64_t tick = 0;
        int rank = 0;  // note-offs sort before note-ons at equal tick
        int pitch = 0;
        bool is_on = false;
    };

    void append_vlq(std::vector<std::uint8_t>& out, std::int64_t value)
    {
        std::uint8_t encoded[4];
        int count = 0;
        std::uint32_t v = static_cast<std::uint32_t>(value);
        do {
            encoded[count++] = v & 0x7F;
            v >>= 7;
        } while (v != 0);
        for (int i = count - 1; i >= 0; --i) {
            out.push_back(encoded[i] | (i > 0 ? 0x80 : 0x00));
        }
    }

    void append_u32be(std::vector<std::uint8_t>& out, std::uint32_t v)
    {
        out.push_back((v >> 24) & 0xFF);
        out.push_back((v >> 16) & 0xFF);
        out.push_back((v >> 8) & 0xFF);
        out.push_back(v & 0xFF);
    }

    void append_u16be(std::vector<std::uint8_t>& out, std::uint32_t v)
    {
        out.push_back((v >> 8) & 0xFF);
        out.push_back(v & 0xFF);
    }

    std::int64_t checked_tick(std::int64_t tick)
    {
        if (tick < 0 || tick > kMaxTick) {
            throw Error("event tick " + std::to_string(tick)
                + " is outside the representable range");
        }
        return tick;
    }

    struct TickSpan {
        std::int64_t start = 0;
        std::int64_t end = 0;
    };

    std::vector<TickSpan> merge_spans(std::vector<TickSpan> spans)
    {
        std::sort(spans.begin(), spans.end(), [](const TickSpan& a, const TickSpan& b) {
            return std::tie(a.start, a.end) < std::tie(b.start, b.end);
        });
        std::vector<TickSpan> merged;
        for (const auto& span : spans) {
            if (!merged.empty() && span.start <= merged.back().end) {
                merged.back().end = std::max(merged.back().end, span.end);
            } else {
                merged.push_back(span);
            }
        }
        return merged;
    }

    std::vector<std::uint8_t> finish_track(const std::vector<std::uint8_t>& body)
    {
        std::vector<std::uint8_t> out;
        out.insert(out.end(), { 'M', 'T', 'r', 'k' });
        append_u32be(out, static_cast<std::uint32_t>(body.size()));
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }

    void append_meta(std::vector<std::uint8_t>& body, std::int64_t delta, int type,
        const std::vector<std::uint8_t>& data)
    {
        append_vlq(body, delta);
        body.push_back(kMetaEventId);
        body.push_back(static_cast<std::uint8_t>(type));
        append_vlq(body, static_cast<std::int64_t>(data.size()));
        body.insert(body.end(), data.begin(), data.end());
    }

}

std::vector<std::uint8_t> emit_chart_midi(const Chart& chart)
{
    if (chart.resolution <= 0) {
        throw Error("chart resolution must be positive");
    }
    chart.tempo_map.validate();

    std::vector<std::vector<std::uint8_t>> chunks;

    // Conductor track: tempo and time-signature events.
    {
        std::vector<std::uint8_t> body;
        struct ConductorEvent {
            std::int64_t tick;
            int rank;
            std::vector<std::uint8_t> data;
            int type;
        };
        std::vector<ConductorEvent> events;
        for (const auto& segment : chart.tempo_map.segments) {
            const int us = segment.us_per_quarter;
            events.push_back(ConductorEvent { checked_tick(segment.start_tick), 0,
                { static_cast<std::uint8_t>((us >> 16) & 0xFF),
                    static_cast<std::uint8_t>((us >> 8) & 0xFF),
                    static_cast<std::uint8_t>(us & 0xFF) },
                kSetTempoMetaId });
        }
        for (const auto& signature : chart.tempo_map.time_signatures) {
            if (signature.numerator <= 0 || signature.denominator <= 0
                || (signature.denominator & (signature.denominator - 1)) != 0) {
                throw Error("time signature denominator must be a power of two");
            }
            int denom_log2 = 0;
            while ((1 << denom_log2) < signature.denominator) {
                ++denom_log2;
            }
            events.push_back(ConductorEvent { checked_tick(signature.start_tick), 1,
                { static_cast<std::uint8_t>(signature.numerator),
                    static_cast<std::uint8_t>(denom_log2), 24, 8 },
                kTimeSignatureMetaId });
        }
        std::stable_sort(events.begin(), events.end(),
            [](const ConductorEvent& a, const ConductorEvent& b) {
                return std::tie(a.tick, a.rank) < std::tie(b.tick, b.rank);
            });
        std::int64_t cursor = 0;
        for (const auto& event : events) {
            append_meta(body, event.tick - cursor, event.type, event.data);
            cursor = event.tick;
        }
        append_meta(body, 0, kEndOfTrackMetaId, {});
        chunks.push_back(finish_track(body));
    }

    for (const auto& [instrument, track] : chart.tracks) {
        const std::int64_t min_sustain_ticks = std::max<std::int64_t>(chart.resolution / 12, 2);
        const std::int64_t zero_sustain_ticks = std::max<std::int64_t>(1, chart.resolution / 24);

        std::vector<TrackEvent> events;
        std::vector<TickSpan> marker_spans[3];
        std::map<std::pair<std::int64_t, int>, bool> seen;
        for (const auto& event : track.events) {
            const std::int64_t on_tick = checked_tick(
                seconds_to_ticks(chart.tempo_map, chart.resolution, event.time));
            std::int64_t length = zero_sustain_ticks;
            if (event.sustain > 0.0) {
                const std::int64_t end_tick = seconds_to_ticks(chart.tempo_map,
                    chart.resolution, event.time + event.sustain);
                if (end_tick - on_tick >= min_sustain_ticks) {
                    length = end_tick - on_tick;
                }
            }
            const std::int64_t off_tick = checked_tick(on_tick + length);

            int pitch = 0;
            if (instrument == Instrument::Vocals) {
                if (event.label.value < 0 || event.label.value > 127) {
                    throw Error("vocal semitone out of range: "
                        + std::to_string(event.label.value));
                }
                pitch = event.label.value;
            } else {
                if (event.label.value < 0 || event.label.value > 4) {
                    throw Error("lane out of range: " + std::to_string(event.label.value));
                }
                pitch = kExpertNoteBase + event.label.value;
                if (instrument == Instrument::Drums && event.label.value >= 2
                    && !event.label.cymbal) {
                    marker_spans[event.label.value - 2].push_back(
                        TickSpan { on_tick, off_tick });
                }
            }

            // Events deduplicated in seconds can still collide after tick
            // quantisation; keep the first.
            if (seen.emplace(std::make_pair(on_tick, pitch), true).second == false) {
                continue;
            }
            events.push_back(TrackEvent { on_tick, 1, pitch, true });
            events.push_back(TrackEvent { off_tick, 0, pitch, false });
        }

        if (instrument == Instrument::Drums) {
            for (int m = 0; m < 3; ++m) {
                for (const auto& span : merge_spans(marker_spans[m])) {
                    events.push_back(TrackEvent { span.start, 1, kTomMarkerBase + m, true });
                    events.push_back(TrackEvent { span.end, 0, kTomMarkerBase + m, false });
                }
            }
        }

        std::sort(events.begin(), events.end(), [](const TrackEvent& a, const TrackEvent& b) {
            return std::tie(a.tick, a.rank, a.pitch) < std::tie(b.tick, b.rank, b.pitch);
        });

        std::vector<std::uint8_t> body;
        const std::string name = [instrument = instrument] {
            switch (instrument) {
            case Instrument::Drums:
                return "PART DRUMS";
            case Instrument::Guitar:
                return "PART GUITAR";
            case Instrument::Bass:
                return "PART BASS";
            case Instrument::Vocals:
                return "PART VOCALS";
            case Instrument::Keys:
                return "PART KEYS";
            }
            throw Error("invalid instrument enum value");
        }();
        append_meta(body, 0, kTrackNameMetaId,
            std::vector<std::uint8_t>(name.begin(), name.end()));

        std::int64_t cursor = 0;
        for (const auto& event : events) {
            append_vlq(body, event.tick - cursor);
            cursor = event.tick;
            body.push_back(static_cast<std::uint8_t>(event.is_on ? kNoteOnId : kNoteOffId));
            body.push_back(static_cast<std::uint8_t>(event.pitch));
            body.push_back(static_cast<std::uint8_t>(event.is_on ? kEmitVelocity
                                                                 : kEmitOffVelocity));
        }
        append_meta(body, 0, kEndOfTrackMetaId, {});
        chunks.push_back(finish_track(body));
    }

    std::vector<std::uint8_t> out;
    out.insert(out.end(), { 'M', 'T', 'h', 'd' });
    append_u32be(out, 6);
    append_u16be(out, 1);
    append_u16be(out, static_cast<std::uint32_t>(chunks.size()));
    append_u16be(out, static_cast<std::uint32_t>(chart.resolution));
    for (const auto& chunk : chunks) {
        out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
}

void write_chart_midi_file(const Chart& chart, const std::string& path)
{
    const auto bytes = emit_chart_midi(chart);
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot open for writing: " + path);
    }
    file.write(reinterpret_cast<const char*>(bytes.data()),
        static_cast<std::streamsize>(bytes.size()));
}

}
