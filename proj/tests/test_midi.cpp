#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "chartkit/errors.hpp"
#include "chartkit/midi.hpp"
#include "chartkit/model.hpp"

namespace chartkit {
namespace {

// Minimal hand-rolled SMF writer, independent of the library's emitter, so
// the parser is exercised against bytes it did not produce itself.
class SmfBuilder {
public:
    explicit SmfBuilder(int resolution)
        : m_resolution(resolution)
    {
    }

    void begin_track() { m_track.clear(); m_last_tick = 0; }

    void meta(std::int64_t tick, std::uint8_t type, const std::vector<std::uint8_t>& payload)
    {
        delta(tick);
        m_track.push_back(0xFF);
        m_track.push_back(type);
        vlq(payload.size());
        m_track.insert(m_track.end(), payload.begin(), payload.end());
    }

    void track_name(const std::string& name)
    {
        meta(0, 0x03, std::vector<std::uint8_t>(name.begin(), name.end()));
    }

    void tempo(std::int64_t tick, int us_per_quarter)
    {
        meta(tick, 0x51,
            { static_cast<std::uint8_t>((us_per_quarter >> 16) & 0xFF),
                static_cast<std::uint8_t>((us_per_quarter >> 8) & 0xFF),
                static_cast<std::uint8_t>(us_per_quarter & 0xFF) });
    }

    void note_on(std::int64_t tick, int pitch, int velocity = 100)
    {
        delta(tick);
        m_track.push_back(0x90);
        m_track.push_back(static_cast<std::uint8_t>(pitch));
        m_track.push_back(static_cast<std::uint8_t>(velocity));
    }

    void note_off(std::int64_t tick, int pitch)
    {
        delta(tick);
        m_track.push_back(0x80);
        m_track.push_back(static_cast<std::uint8_t>(pitch));
        m_track.push_back(64);
    }

    void end_track()
    {
        meta(m_last_tick, 0x2F, {});
        m_tracks.push_back(m_track);
    }

    std::vector<std::uint8_t> bytes(int format = 1) const
    {
        std::vector<std::uint8_t> out;
        auto u16 = [&out](int v) {
            out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
            out.push_back(static_cast<std::uint8_t>(v & 0xFF));
        };
        auto u32 = [&out](std::size_t v) {
            out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
            out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
            out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
            out.push_back(static_cast<std::uint8_t>(v & 0xFF));
        };
        out.insert(out.end(), { 'M', 'T', 'h', 'd' });
        u32(6);
        u16(format);
        u16(static_cast<int>(m_tracks.size()));
        u16(m_resolution);
        for (const auto& track : m_tracks) {
            out.insert(out.end(), { 'M', 'T', 'r', 'k' });
            u32(track.size());
            out.insert(out.end(), track.begin(), track.end());
        }
        return out;
    }

private:
    void delta(std::int64_t tick)
    {
        vlq(static_cast<std::uint64_t>(tick - m_last_tick));
        m_last_tick = tick;
    }

    void vlq(std::uint64_t value)
    {
        std::uint8_t stack[8];
        int count = 0;
        stack[count++] = static_cast<std::uint8_t>(value & 0x7F);
        value >>= 7;
        while (value != 0) {
            stack[count++] = static_cast<std::uint8_t>(0x80 | (value & 0x7F));
            value >>= 7;
        }
        while (count > 0) {
            m_track.push_back(stack[--count]);
        }
    }

    int m_resolution;
    std::int64_t m_last_tick = 0;
    std::vector<std::uint8_t> m_track;
    std::vector<std::vector<std::uint8_t>> m_tracks;
};

TEST(MidiParse, DrumsWithTomMarkers)
{
    SmfBuilder smf(480);
    smf.begin_track();
    smf.tempo(0, 500000);
    smf.end_track();

    smf.begin_track();
    smf.track_name("PART DRUMS");
    smf.note_on(0, 96);     // kick
    smf.note_off(10, 96);
    smf.note_on(480, 98);   // yellow, no marker -> cymbal
    smf.note_off(490, 98);
    smf.note_on(960, 110);  // yellow tom marker opens
    smf.note_on(960, 98);   // yellow under marker -> tom
    smf.note_off(970, 98);
    smf.note_off(1200, 110);
    smf.note_on(1440, 100); // green, no marker -> cymbal
    smf.note_off(1450, 100);
    smf.end_track();

    const ParsedChart parsed = parse_chart_midi(smf.bytes().data(), smf.bytes().size());
    EXPECT_TRUE(parsed.warnings.empty());
    ASSERT_TRUE(parsed.chart.tracks.count(Instrument::Drums));
    const auto& events = parsed.chart.tracks.at(Instrument::Drums).events;
    ASSERT_EQ(events.size(), 4u);
    EXPECT_EQ(events[0].label, (Label { 0, false }));
    EXPECT_EQ(events[1].label, (Label { 2, true }));
    EXPECT_EQ(events[2].label, (Label { 2, false }));
    EXPECT_EQ(events[3].label, (Label { 4, true }));
    EXPECT_DOUBLE_EQ(events[0].time, 0.0);
    EXPECT_DOUBLE_EQ(events[1].time, 0.5);
    EXPECT_DOUBLE_EQ(events[2].time, 1.0);
    EXPECT_DOUBLE_EQ(events[3].time, 1.5);
}

TEST(MidiParse, GuitarFretsAndVocalSemitones)
{
    SmfBuilder smf(480);
    smf.begin_track();
    smf.tempo(0, 500000);
    smf.end_track();

    smf.begin_track();
    smf.track_name("PART GUITAR");
    for (int fret = 0; fret < 5; ++fret) {
        smf.note_on(fret * 480, 96 + fret);
        smf.note_off(fret * 480 + 10, 96 + fret);
    }
    smf.end_track();

    smf.begin_track();
    smf.track_name("PART VOCALS");
    smf.note_on(0, 60);
    smf.note_off(100, 60);
    smf.note_on(480, 72);
    smf.note_off(580, 72);
    smf.end_track();

    const auto data = smf.bytes();
    const ParsedChart parsed = parse_chart_midi(data.data(), data.size());
    const auto& guitar = parsed.chart.tracks.at(Instrument::Guitar).events;
    ASSERT_EQ(guitar.size(), 5u);
    for (int fret = 0; fret < 5; ++fret) {
        EXPECT_EQ(guitar[fret].label.value, fret);
        EXPECT_FALSE(guitar[fret].label.cymbal);
    }
    const auto& vocals = parsed.chart.tracks.at(Instrument::Vocals).events;
    ASSERT_EQ(vocals.size(), 2u);
    EXPECT_EQ(vocals[0].label.value, 60);
    EXPECT_EQ(vocals[1].label.value, 72);
}

TEST(MidiParse, UnknownTrackWarnsAndSkips)
{
    SmfBuilder smf(480);
    smf.begin_track();
    smf.tempo(0, 500000);
    smf.end_track();

    smf.begin_track();
    smf.track_name("PART HARMONICA");
    smf.note_on(0, 96);
    smf.note_off(10, 96);
    smf.end_track();

    const auto data = smf.bytes();
    const ParsedChart parsed = parse_chart_midi(data.data(), data.size());
    EXPECT_TRUE(parsed.chart.tracks.empty());
    ASSERT_EQ(parsed.warnings.size(), 1u);
    EXPECT_NE(parsed.warnings[0].find("PART HARMONICA"), std::string::npos);
}

TEST(MidiParse, ShortNotesParseAsZeroSustain)
{
    SmfBuilder smf(480);  // threshold: 480 / 12 = 40 ticks
    smf.begin_track();
    smf.tempo(0, 500000);
    smf.end_track();

    smf.begin_track();
    smf.track_name("PART DRUMS");
    smf.note_on(0, 96);
    smf.note_off(39, 96);    // under the threshold
    smf.note_on(480, 97);
    smf.note_off(520, 97);   // exactly at the threshold: kept
    smf.end_track();

    const auto data = smf.bytes();
    const ParsedChart parsed = parse_chart_midi(data.data(), data.size());
    const auto& events = parsed.chart.tracks.at(Instrument::Drums).events;
    ASSERT_EQ(events.size(), 2u);
    EXPECT_DOUBLE_EQ(events[0].sustain, 0.0);
    EXPECT_GT(events[1].sustain, 0.0);
    // The parser subtracts two absolute times, so the last few bits can
    // differ from the algebraic tick duration.
    EXPECT_NEAR(events[1].sustain, 40.0 * 0.5 / 480.0, 1e-12);
}

TEST(MidiParse, MultiSegmentTempoMapConvertsTimes)
{
    SmfBuilder smf(480);
    smf.begin_track();
    smf.tempo(0, 500000);   // 120 BPM
    smf.tempo(960, 250000); // 240 BPM from tick 960
    smf.end_track();

    smf.begin_track();
    smf.track_name("PART DRUMS");
    smf.note_on(1440, 96);  // 960 ticks at 120 BPM (1.0 s) + 480 at 240 (0.25 s)
    smf.note_off(1450, 96);
    smf.end_track();

    const auto data = smf.bytes();
    const ParsedChart parsed = parse_chart_midi(data.data(), data.size());
    const auto& events = parsed.chart.tracks.at(Instrument::Drums).events;
    ASSERT_EQ(events.size(), 1u);
    EXPECT_DOUBLE_EQ(events[0].time, 1.25);
    ASSERT_EQ(parsed.chart.tempo_map.segments.size(), 2u);
    EXPECT_EQ(parsed.chart.tempo_map.segments[1].start_tick, 960);
    EXPECT_EQ(parsed.chart.tempo_map.segments[1].us_per_quarter, 250000);
}

TEST(MidiParse, MalformedInputThrows)
{
    const std::vector<std::uint8_t> empty;
    EXPECT_THROW(parse_chart_midi(empty.data(), empty.size()), ParseError);

    std::vector<std::uint8_t> bad_magic = { 'X', 'T', 'h', 'd', 0, 0, 0, 6 };
    EXPECT_THROW(parse_chart_midi(bad_magic.data(), bad_magic.size()), ParseError);

    SmfBuilder smf(480);
    smf.begin_track();
    smf.tempo(0, 500000);
    smf.end_track();
    auto truncated = smf.bytes();
    truncated.resize(truncated.size() - 3);
    EXPECT_THROW(parse_chart_midi(truncated.data(), truncated.size()), ParseError);
}

Chart random_chart(std::mt19937& rng)
{
    Chart chart;
    chart.resolution = 480;
    std::uniform_int_distribution<int> segment_count(1, 3);
    std::uniform_int_distribution<int> uspq(200000, 1000000);
    chart.tempo_map.segments.clear();
    std::int64_t tick = 0;
    const int segments = segment_count(rng);
    for (int i = 0; i < segments; ++i) {
        chart.tempo_map.segments.push_back(TempoSegment { tick, uspq(rng) });
        tick += std::uniform_int_distribution<std::int64_t>(480, 4800)(rng);
    }

    const Instrument instruments[] = { Instrument::Drums, Instrument::Guitar,
        Instrument::Bass, Instrument::Vocals, Instrument::Keys };
    for (Instrument instrument : instruments) {
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
            continue;  // leave some instruments absent
        }
        std::vector<TimedEvent> events;
        const int count = std::uniform_int_distribution<int>(1, 40)(rng);
        // Overlapping notes on one key have no faithful SMF form, so
        // consecutive events keep a gap wider than the longest sustain; a
        // chord partner may share the tick but always sits on another lane.
        std::int64_t on_tick = std::uniform_int_distribution<std::int64_t>(0, 500)(rng);
        for (int i = 0; i < count; ++i) {
            const auto pick_lane = [&](int avoid) {
                if (instrument == Instrument::Vocals) {
                    const int lo = 36;
                    const int span = 84 - 36;  // exclusive of `avoid`
                    const int raw = lo + std::uniform_int_distribution<int>(0, span - 1)(rng);
                    return raw >= avoid && avoid >= lo ? raw + 1 : raw;
                }
                const int raw = std::uniform_int_distribution<int>(0, 3)(rng);
                return avoid >= 0 && raw >= avoid ? raw + 1 : raw;
            };
            const auto make_event = [&](int lane) {
                TimedEvent event;
                event.time = ticks_to_seconds(chart.tempo_map, chart.resolution, on_tick);
                const bool cymbal = instrument == Instrument::Drums && lane >= 2
                    && std::uniform_int_distribution<int>(0, 1)(rng) == 1;
                event.label = Label { lane, cymbal };
                // Sustains must be 0 or at least resolution / 12 ticks to be
                // representable; anything shorter round-trips to 0 by design.
                if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
                    const std::int64_t len
                        = std::uniform_int_distribution<std::int64_t>(40, 2000)(rng);
                    event.sustain
                        = ticks_to_seconds(chart.tempo_map, chart.resolution, on_tick + len)
                        - event.time;
                }
                return event;
            };
            const int lane = instrument == Instrument::Vocals
                ? std::uniform_int_distribution<int>(36, 84)(rng)
                : std::uniform_int_distribution<int>(0, 4)(rng);
            events.push_back(make_event(lane));
            if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) {
                events.push_back(make_event(pick_lane(lane)));
            }
            on_tick += std::uniform_int_distribution<std::int64_t>(2100, 3000)(rng);
        }
        chart.tracks[instrument] = Track::normalized(instrument, std::move(events));
    }
    return chart;
}

void expect_charts_equal(const Chart& a, const Chart& b)
{
    EXPECT_EQ(a.resolution, b.resolution);
    ASSERT_EQ(a.tempo_map.segments.size(), b.tempo_map.segments.size());
    for (std::size_t i = 0; i < a.tempo_map.segments.size(); ++i) {
        EXPECT_EQ(a.tempo_map.segments[i].start_tick, b.tempo_map.segments[i].start_tick);
        EXPECT_EQ(a.tempo_map.segments[i].us_per_quarter, b.tempo_map.segments[i].us_per_quarter);
    }
    ASSERT_EQ(a.tracks.size(), b.tracks.size());
    for (const auto& [instrument, track] : a.tracks) {
        ASSERT_TRUE(b.tracks.count(instrument));
        const auto& other = b.tracks.at(instrument).events;
        ASSERT_EQ(track.events.size(), other.size()) << instrument_name(instrument);
        for (std::size_t i = 0; i < track.events.size(); ++i) {
            EXPECT_EQ(track.events[i].label, other[i].label);
            EXPECT_NEAR(track.events[i].time, other[i].time, 1e-9);
            EXPECT_NEAR(track.events[i].sustain, other[i].sustain, 1e-9);
        }
    }
}

TEST(MidiRoundTrip, RandomCharts)
{
    std::mt19937 rng(20260819);
    for (int trial = 0; trial < 50; ++trial) {
        const Chart chart = random_chart(rng);
        const std::vector<std::uint8_t> bytes = emit_chart_midi(chart);
        const ParsedChart parsed = parse_chart_midi(bytes.data(), bytes.size());
        expect_charts_equal(chart, parsed.chart);
    }
}

TEST(MidiRoundTrip, EmissionIsDeterministic)
{
    std::mt19937 rng(7);
    const Chart chart = random_chart(rng);
    EXPECT_EQ(emit_chart_midi(chart), emit_chart_midi(chart));
}

}
}
