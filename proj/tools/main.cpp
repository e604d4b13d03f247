#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chartkit/ablation.hpp"
#include "chartkit/audio.hpp"
#include "chartkit/correctors.hpp"
#include "chartkit/errors.hpp"
#include "chartkit/evaluation.hpp"
#include "chartkit/lane_map.hpp"
#include "chartkit/manifest.hpp"
#include "chartkit/midi.hpp"
#include "chartkit/model.hpp"
#include "chartkit/prediction.hpp"
#include "chartkit/report.hpp"
#include "chartkit/screening.hpp"
#include "chartkit/tempo.hpp"

namespace fs = std::filesystem;
using namespace chartkit;

namespace {

constexpr std::array<Instrument, 5> kAllInstruments {
    Instrument::Drums,
    Instrument::Guitar,
    Instrument::Bass,
    Instrument::Vocals,
    Instrument::Keys,
};

std::string fixed(double value, int digits)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

std::string resolve_path(const std::string& root, const std::string& path)
{
    const fs::path p(path);
    if (p.is_absolute() || root.empty()) {
        return path;
    }
    return (fs::path(root) / p).string();
}

// Audio root precedence: --audio-root flag, CHARTKIT_AUDIO_ROOT, then the
// manifest's own directory.
std::string audio_root_for(const std::string& flag, const std::string& manifest_path)
{
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("CHARTKIT_AUDIO_ROOT"); env != nullptr && *env) {
        return env;
    }
    return fs::path(manifest_path).parent_path().string();
}

void write_file(const fs::path& path, const std::string& content)
{
    if (!path.parent_path().empty()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot write " + path.string());
    }
    file << content;
}

// Runs fn(0..n-1) on up to `jobs` threads. Each slot owns its own result,
// so the reduction order never depends on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn)
{
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next { 0 };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                fn(i);
            }
        });
    }
    for (auto& thread : threads) {
        thread.join();
    }
}

fs::path prediction_path(const std::string& dir, const std::string& song_id,
    Instrument instrument)
{
    return fs::path(dir) / (song_id + "." + instrument_name(instrument) + ".tsv");
}

// Collects every <song_id>.<instrument>.tsv found in `dir` into one chart.
Chart load_prediction_chart(const std::string& dir, const std::string& song_id)
{
    Chart chart;
    for (const Instrument instrument : kAllInstruments) {
        const fs::path path = prediction_path(dir, song_id, instrument);
        if (!fs::exists(path)) {
            continue;
        }
        Track track = to_track(load_predictions(path.string(), instrument));
        if (chart.tracks.count(track.instrument) > 0) {
            throw Error("two prediction files declare " + song_id + " "
                + instrument_name(track.instrument));
        }
        chart.tracks[track.instrument] = std::move(track);
    }
    if (chart.tracks.empty()) {
        throw Error("no prediction files for " + song_id + " in " + dir);
    }
    return chart;
}

int run_screen(const std::string& manifest_path, const std::string& audio_root_flag,
    double threshold, const std::string& out_dir, int jobs, std::size_t sample_count,
    std::size_t genre_cap, std::uint64_t seed)
{
    Manifest manifest = load_manifest(manifest_path);
    const std::string root = audio_root_for(audio_root_flag, manifest_path);

    std::vector<ScreenRow> rows(manifest.entries.size());
    parallel_for(manifest.entries.size(), jobs, [&](std::size_t i) {
        auto& entry = manifest.entries[i];
        auto& row = rows[i];
        row.song_id = entry.song_id;
        try {
            const AudioBuffer mix = decode_wav(resolve_path(root, entry.mix_audio_path));
            const AudioBuffer stem = decode_wav(resolve_path(root, entry.drum_stem_path));
            const ScreenResult result
                = screen_stem(stem, compute_mix_stats(mix), threshold);
            row.statistic = result.statistic;
            row.passed = result.passed;
            entry.passed_screen = result.passed;
            entry.median_drum_rms = result.statistic;
        } catch (const std::exception& error) {
            row.ok = false;
            row.error = error.what();
        }
    });

    const ScreenSummary summary = summarize_screen(std::move(rows));
    std::cout << render_screen_text(summary);

    if (!out_dir.empty()) {
        write_file(fs::path(out_dir) / "screen.txt", render_screen_text(summary));
        write_file(fs::path(out_dir) / "screen.json", render_screen_json(summary));
        write_file(fs::path(out_dir) / "manifest.json", serialize_manifest(manifest));
    }

    if (sample_count > 0) {
        std::vector<ManifestEntry> passers;
        for (const auto& entry : manifest.entries) {
            if (entry.passed_screen) {
                passers.push_back(entry);
            }
        }
        Manifest benchmark;
        benchmark.entries = sample_benchmark(passers, sample_count, genre_cap, seed);
        write_file(fs::path(out_dir) / "benchmark.json", serialize_manifest(benchmark));
        std::cout << "sampled " << benchmark.entries.size() << " of " << passers.size()
                  << " passers into benchmark.json\n";
    }

    return summary.errors > 0 ? 1 : 0;
}

int run_evaluate(const std::string& manifest_path, const std::string& predictions_dir,
    const std::string& audio_root_flag, double tolerance, double offset_range,
    double offset_step, const std::string& out_dir, int jobs, bool passed_only)
{
    const Manifest manifest = load_manifest(manifest_path);
    const std::string root = audio_root_for(audio_root_flag, manifest_path);

    std::vector<const ManifestEntry*> entries;
    for (const auto& entry : manifest.entries) {
        if (!passed_only || entry.passed_screen) {
            entries.push_back(&entry);
        }
    }

    std::vector<SongEvaluation> rows(entries.size());
    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        const ManifestEntry& entry = *entries[i];
        auto& row = rows[i];
        row.song_id = entry.song_id;
        try {
            const ParsedChart gt
                = parse_chart_midi_file(resolve_path(root, entry.gt_chart_path));
            const Chart pred = load_prediction_chart(predictions_dir, entry.song_id);
            row.result = offset_search(gt.chart, pred, tolerance, offset_range,
                offset_step);
        } catch (const std::exception& error) {
            row.ok = false;
            row.error = error.what();
        }
    });

    const EvaluationSummary summary = summarize_evaluations(std::move(rows));
    std::cout << render_evaluation_text(summary);

    if (!out_dir.empty()) {
        write_file(fs::path(out_dir) / "eval.txt", render_evaluation_text(summary));
        write_file(fs::path(out_dir) / "eval.json", render_evaluation_json(summary));
    }
    return summary.errors > 0 ? 1 : 0;
}

int run_ablate(const std::string& manifest_path, const std::string& full_dir,
    const std::string& ablated_dir, const std::string& component,
    const std::string& audio_root_flag, double tolerance, double offset_range,
    double offset_step, const std::string& out_dir, int jobs)
{
    const Manifest manifest = load_manifest(manifest_path);
    const std::string root = audio_root_for(audio_root_flag, manifest_path);

    struct Slot {
        bool ok = true;
        std::string song_id;
        std::string error;
        SongRun full;
        SongRun ablated;
    };

    std::vector<Slot> slots(manifest.entries.size());
    parallel_for(manifest.entries.size(), jobs, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        auto& slot = slots[i];
        slot.song_id = entry.song_id;
        try {
            const ParsedChart gt
                = parse_chart_midi_file(resolve_path(root, entry.gt_chart_path));
            const auto run_side = [&](const std::string& dir) {
                const Chart pred = load_prediction_chart(dir, entry.song_id);
                const OffsetSearchResult result
                    = offset_search(gt.chart, pred, tolerance, offset_range, offset_step);
                SongRun run;
                run.song_id = entry.song_id;
                run.f1 = result.per_instrument.at(Instrument::Drums).prf.f1;
                run.drum_events = pred.tracks.at(Instrument::Drums).events;
                return run;
            };
            slot.full = run_side(full_dir);
            slot.ablated = run_side(ablated_dir);
        } catch (const std::exception& error) {
            slot.ok = false;
            slot.error = error.what();
        }
    });

    std::vector<SongRun> full_runs;
    std::vector<SongRun> ablated_runs;
    std::size_t errors = 0;
    std::string error_text;
    for (const auto& slot : slots) {
        if (!slot.ok) {
            ++errors;
            error_text += slot.song_id + "  ERROR: " + slot.error + "\n";
            continue;
        }
        full_runs.push_back(slot.full);
        ablated_runs.push_back(slot.ablated);
    }

    const AblationReport report
        = ablation_report(full_runs, ablated_runs, component);
    std::string text = render_ablation_text({ report });
    if (!error_text.empty()) {
        text += "\n" + error_text;
    }
    std::cout << text;

    if (!out_dir.empty()) {
        write_file(fs::path(out_dir) / "ablate.txt", text);
        write_file(fs::path(out_dir) / "ablate.json", render_ablation_json({ report }));
    }
    return errors > 0 ? 1 : 0;
}

int run_tempo(const std::string& audio_path, bool as_json)
{
    const AudioBuffer audio = decode_wav(audio_path);
    const OnsetEnvelope envelope = onset_envelope(audio);
    const double coarse = estimate_bpm_coarse(envelope);
    const TempoEstimate estimate = refine_bpm(envelope, coarse);
    const std::vector<TempoChange> changes = detect_tempo_changes(envelope, estimate);

    if (as_json) {
        nlohmann::ordered_json root;
        root["coarse_bpm"] = coarse;
        root["bpm"] = estimate.bpm;
        root["coherence"] = estimate.coherence;
        root["phase"] = estimate.phase;
        root["changes"] = nlohmann::ordered_json::array();
        for (const auto& change : changes) {
            root["changes"].push_back(
                nlohmann::ordered_json { { "time", change.time }, { "bpm", change.bpm } });
        }
        std::cout << root.dump(2) << "\n";
    } else {
        std::cout << "coarse_bpm " << fixed(coarse, 3) << "\n";
        std::cout << "bpm " << fixed(estimate.bpm, 3) << "\n";
        std::cout << "coherence " << fixed(estimate.coherence, 4) << "\n";
        std::cout << "changes " << changes.size() << "\n";
        for (const auto& change : changes) {
            std::cout << "  t=" << fixed(change.time, 3) << " bpm=" << fixed(change.bpm, 3)
                      << "\n";
        }
    }
    return 0;
}

int run_ceiling(const std::string& chart_path, const std::string& audio_path,
    double tolerance, const std::string& instrument_flag, bool as_json)
{
    const Instrument instrument = instrument_from_name(instrument_flag);
    const ParsedChart parsed = parse_chart_midi_file(chart_path);
    const auto it = parsed.chart.tracks.find(instrument);
    if (it == parsed.chart.tracks.end()) {
        throw Error("chart has no " + std::string(instrument_name(instrument))
            + " track");
    }
    std::vector<double> gt_times;
    gt_times.reserve(it->second.events.size());
    for (const auto& event : it->second.events) {
        gt_times.push_back(event.time);
    }

    const AudioBuffer audio = decode_wav(audio_path);
    const auto peaks = pick_peaks(onset_envelope(audio));
    std::vector<double> peak_times;
    peak_times.reserve(peaks.size());
    for (const auto& peak : peaks) {
        peak_times.push_back(peak.time);
    }

    const CeilingResult result = gt_ceiling(gt_times, peak_times, tolerance);
    if (as_json) {
        nlohmann::ordered_json root;
        root["gt_events"] = result.gt_count;
        root["fraction_within"] = result.fraction_within;
        root["bin_centers"] = result.bin_centers;
        root["histogram"] = result.histogram;
        std::cout << root.dump(2) << "\n";
    } else {
        std::cout << "gt_events " << result.gt_count << "\n";
        std::cout << "fraction_within " << fixed(result.fraction_within, 3) << "\n";
        std::cout << "histogram (bin_center count)\n";
        for (std::size_t i = 0; i < result.histogram.size(); ++i) {
            std::cout << "  " << fixed(result.bin_centers[i], 3) << " "
                      << result.histogram[i] << "\n";
        }
    }
    return 0;
}

int run_correct(const std::string& predictions_path, const std::string& stem_path,
    const std::string& out_path, const std::vector<std::string>& disabled)
{
    PredictionFile file = load_predictions(predictions_path, Instrument::Drums);
    if (file.instrument != Instrument::Drums) {
        throw Error("correct expects drum predictions, got "
            + std::string(instrument_name(file.instrument)));
    }

    CorrectorConfig config;
    for (const auto& rule : disabled) {
        set_rule_enabled(config, rule, false);
    }

    const AudioBuffer stem = decode_wav(stem_path);
    const OnsetEnvelope envelope = onset_envelope(stem);
    const StemBandEnergy bands = compute_stem_band_energy(stem, config);

    const std::size_t before = file.events.size();
    file.events = run_pipeline(std::move(file.events), config, &envelope, &bands);
    save_predictions(file, out_path);
    std::cout << "kept " << file.events.size() << " of " << before << " events\n";
    return 0;
}

int run_map_lanes(const std::string& notes_path, const std::string& out_path,
    const std::string& instrument_flag, int window)
{
    const Instrument instrument = instrument_from_name(instrument_flag);
    if (instrument != Instrument::Guitar && instrument != Instrument::Bass
        && instrument != Instrument::Keys) {
        throw Error("map-lanes targets a fretted instrument");
    }
    const std::vector<PitchedNote> notes = load_pitched_notes(notes_path);
    const std::vector<TimedEvent> events = map_to_lanes(notes, running_tonic(notes, window));

    PredictionFile file;
    file.instrument = instrument;
    file.events.reserve(events.size());
    for (const auto& event : events) {
        PredictionEvent prediction;
        prediction.time = event.time;
        prediction.label = event.label;
        prediction.confidence = event.confidence;
        prediction.sustain = event.sustain;
        file.events.push_back(prediction);
    }
    save_predictions(file, out_path);
    std::cout << "mapped " << events.size() << " notes\n";
    return 0;
}

bool has_midi_extension(const std::string& path)
{
    const std::string ext = fs::path(path).extension().string();
    return ext == ".mid" || ext == ".midi";
}

int run_convert(const std::string& in_path, const std::string& out_path,
    const std::string& instrument_flag, double bpm, int resolution)
{
    const bool in_midi = has_midi_extension(in_path);
    const bool out_midi = has_midi_extension(out_path);
    if (in_midi == out_midi) {
        throw Error("convert needs one MIDI side and one prediction-file side");
    }

    const Instrument instrument = instrument_from_name(instrument_flag);
    if (in_midi) {
        const ParsedChart parsed = parse_chart_midi_file(in_path);
        const auto it = parsed.chart.tracks.find(instrument);
        if (it == parsed.chart.tracks.end()) {
            throw Error("chart has no " + std::string(instrument_name(instrument))
                + " track");
        }
        save_predictions(from_track(it->second), out_path);
        std::cout << "wrote " << out_path << " (" << it->second.events.size()
                  << " events)\n";
    } else {
        const PredictionFile file = load_predictions(in_path, instrument);
        Chart chart;
        chart.resolution = resolution;
        chart.tempo_map.segments = { TempoSegment { 0,
            static_cast<int>(std::llround(60000000.0 / bpm)) } };
        Track track = to_track(file);
        chart.tracks[track.instrument] = std::move(track);
        write_chart_midi_file(chart, out_path);
        std::cout << "wrote " << out_path << " (" << file.events.size() << " events)\n";
    }
    return 0;
}

}

int main(int argc, char** argv)
{
    CLI::App app { "chartkit: rhythm-game chart evaluation and processing" };
    app.require_subcommand(1);
    app.set_version_flag("--version", "chartkit 0.1.0");

    // screen
    auto* screen = app.add_subcommand("screen",
        "Apply the drum-stem loudness screen to every manifest entry");
    std::string screen_manifest;
    std::string screen_root;
    std::string screen_out;
    double screen_threshold = kScreenThreshold;
    int screen_jobs = 1;
    std::size_t screen_sample = 0;
    std::size_t screen_cap = 6;
    std::uint64_t screen_seed = 20260510ULL;
    screen->add_option("--manifest", screen_manifest, "Manifest JSON")->required();
    screen->add_option("--audio-root", screen_root,
        "Base directory for relative audio paths (default: CHARTKIT_AUDIO_ROOT or the "
        "manifest directory)");
    screen->add_option("--threshold", screen_threshold, "Pass threshold on the statistic");
    screen->add_option("--out", screen_out, "Report directory");
    screen->add_option("--jobs", screen_jobs, "Concurrent songs")->check(CLI::Range(1, 256));
    auto* sample_opt = screen->add_option("--sample", screen_sample,
        "Also draw a genre-capped benchmark of this size from the passers");
    screen->add_option("--genre-cap", screen_cap, "Max songs per genre when sampling");
    screen->add_option("--seed", screen_seed, "Sampling seed");
    sample_opt->needs(screen->get_option("--out"));

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate",
        "Score prediction files against ground-truth charts with offset search");
    std::string eval_manifest;
    std::string eval_dir;
    std::string eval_root;
    std::string eval_out;
    double eval_tol = 0.1;
    double eval_range = 0.2;
    double eval_step = 0.01;
    int eval_jobs = 1;
    bool eval_passed_only = false;
    evaluate->add_option("--manifest", eval_manifest, "Manifest JSON")->required();
    evaluate->add_option("--predictions", eval_dir, "Directory of <song>.<instrument>.tsv")
        ->required();
    evaluate->add_option("--audio-root", eval_root, "Base directory for relative paths");
    evaluate->add_option("--tol", eval_tol, "Match tolerance, seconds");
    evaluate->add_option("--offset-range", eval_range, "Offset search half-range, seconds");
    evaluate->add_option("--offset-step", eval_step, "Offset search step, seconds");
    evaluate->add_option("--out", eval_out, "Report directory");
    evaluate->add_option("--jobs", eval_jobs, "Concurrent songs")->check(CLI::Range(1, 256));
    evaluate->add_flag("--passed-only", eval_passed_only,
        "Evaluate only entries with passed_screen");

    // ablate
    auto* ablate = app.add_subcommand("ablate",
        "Compare full-system and ablated prediction runs over one manifest");
    std::string ablate_manifest;
    std::string ablate_full;
    std::string ablate_dir;
    std::string ablate_component;
    std::string ablate_root;
    std::string ablate_out;
    double ablate_tol = 0.1;
    double ablate_range = 0.2;
    double ablate_step = 0.01;
    int ablate_jobs = 1;
    ablate->add_option("--manifest", ablate_manifest, "Manifest JSON")->required();
    ablate->add_option("--full", ablate_full, "Full-system prediction directory")
        ->required();
    ablate->add_option("--ablated", ablate_dir, "Ablated prediction directory")->required();
    ablate->add_option("--component", ablate_component, "Name of the disabled component")
        ->required();
    ablate->add_option("--audio-root", ablate_root, "Base directory for relative paths");
    ablate->add_option("--tol", ablate_tol, "Match tolerance, seconds");
    ablate->add_option("--offset-range", ablate_range, "Offset search half-range, seconds");
    ablate->add_option("--offset-step", ablate_step, "Offset search step, seconds");
    ablate->add_option("--out", ablate_out, "Report directory");
    ablate->add_option("--jobs", ablate_jobs, "Concurrent songs")->check(CLI::Range(1, 256));

    // tempo
    auto* tempo = app.add_subcommand("tempo", "Estimate BPM and tempo changes of a WAV");
    std::string tempo_audio;
    bool tempo_json = false;
    tempo->add_option("audio", tempo_audio, "WAV file")->required();
    tempo->add_flag("--json", tempo_json, "Machine-readable output");

    // ceiling
    auto* ceiling = app.add_subcommand("ceiling",
        "Fraction of ground-truth events near any detected onset");
    std::string ceiling_chart;
    std::string ceiling_audio;
    std::string ceiling_instrument = "drums";
    double ceiling_tol = 0.1;
    bool ceiling_json = false;
    ceiling->add_option("--chart", ceiling_chart, "Ground-truth MIDI chart")->required();
    ceiling->add_option("--audio", ceiling_audio, "WAV file")->required();
    ceiling->add_option("--tol", ceiling_tol, "Tolerance, seconds");
    ceiling->add_option("--instrument", ceiling_instrument, "Track to measure");
    ceiling->add_flag("--json", ceiling_json, "Machine-readable output");

    // correct
    auto* correct = app.add_subcommand("correct",
        "Run the drum corrector stack over a prediction file");
    std::string correct_in;
    std::string correct_stem;
    std::string correct_out;
    std::vector<std::string> correct_disabled;
    correct->add_option("--predictions", correct_in, "Drum prediction file")->required();
    correct->add_option("--stem", correct_stem, "Drum stem WAV")->required();
    correct->add_option("--out", correct_out, "Corrected prediction file")->required();
    correct->add_option("--disable", correct_disabled, "Rule to disable (repeatable)");

    // map-lanes
    auto* map_lanes = app.add_subcommand("map-lanes",
        "Assign 5-fret lanes to a monophonic pitched-note file");
    std::string lanes_in;
    std::string lanes_out;
    std::string lanes_instrument = "guitar";
    int lanes_window = kTonicWindowNotes;
    map_lanes->add_option("--notes", lanes_in, "Pitched-note TSV")->required();
    map_lanes->add_option("--out", lanes_out, "Prediction file to write")->required();
    map_lanes->add_option("--instrument", lanes_instrument, "guitar, bass or keys");
    map_lanes->add_option("--window", lanes_window, "Tonic histogram window, notes")
        ->check(CLI::Range(1, 1024));

    // convert
    auto* convert = app.add_subcommand("convert",
        "Convert between MIDI charts and prediction files");
    std::string convert_in;
    std::string convert_out;
    std::string convert_instrument = "drums";
    double convert_bpm = 120.0;
    int convert_resolution = 480;
    convert->add_option("--in", convert_in, "Input (.mid/.midi or .tsv)")->required();
    convert->add_option("--out", convert_out, "Output (.tsv or .mid/.midi)")->required();
    convert->add_option("--instrument", convert_instrument, "Instrument to extract/emit");
    convert->add_option("--bpm", convert_bpm, "Tempo for emitted MIDI")
        ->check(CLI::PositiveNumber);
    convert->add_option("--resolution", convert_resolution, "Ticks per quarter note")
        ->check(CLI::Range(24, 960));

    CLI11_PARSE(app, argc, argv);

    try {
        if (screen->parsed()) {
            return run_screen(screen_manifest, screen_root, screen_threshold, screen_out,
                screen_jobs, screen_sample, screen_cap, screen_seed);
        }
        if (evaluate->parsed()) {
            return run_evaluate(eval_manifest, eval_dir, eval_root, eval_tol, eval_range,
                eval_step, eval_out, eval_jobs, eval_passed_only);
        }
        if (ablate->parsed()) {
            return run_ablate(ablate_manifest, ablate_full, ablate_dir, ablate_component,
                ablate_root, ablate_tol, ablate_range, ablate_step, ablate_out,
                ablate_jobs);
        }
        if (tempo->parsed()) {
            return run_tempo(tempo_audio, tempo_json);
        }
        if (ceiling->parsed()) {
            return run_ceiling(ceiling_chart, ceiling_audio, ceiling_tol,
                ceiling_instrument, ceiling_json);
        }
        if (correct->parsed()) {
            return run_correct(correct_in, correct_stem, correct_out, correct_disabled);
        }
        if (map_lanes->parsed()) {
            return run_map_lanes(lanes_in, lanes_out, lanes_instrument, lanes_window);
        }
        if (convert->parsed()) {
            return run_convert(convert_in, convert_out, convert_instrument, convert_bpm,
                convert_resolution);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
    return 0;
}
