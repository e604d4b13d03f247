#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "chartkit/ablation.hpp"
#include "chartkit/audio.hpp"
#include "chartkit/evaluation.hpp"
#include "chartkit/model.hpp"
#include "chartkit/tempo.hpp"

namespace {

using namespace chartkit;

std::vector<TimedEvent> random_events(std::size_t count, double span, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> time_dist(0.0, span);
    std::uniform_int_distribution<int> lane_dist(0, 4);
    std::vector<TimedEvent> events(count);
    for (auto& event : events) {
        event.time = time_dist(rng);
        event.label = Label { lane_dist(rng), false };
    }
    return Track::normalized(Instrument::Drums, std::move(events)).events;
}

AudioBuffer click_track(double seconds, double bpm)
{
    AudioBuffer audio;
    audio.samples.assign(static_cast<std::size_t>(seconds * kInternalSampleRate), 0.0f);
    const double period = 60.0 / bpm;
    for (double t = 0.0; t < seconds; t += period) {
        const auto start = static_cast<std::size_t>(t * kInternalSampleRate);
        for (std::size_t i = start; i < start + 64 && i < audio.samples.size(); ++i) {
            audio.samples[i] = 0.9f * std::exp(-0.05 * static_cast<double>(i - start));
        }
    }
    return audio;
}

void bm_greedy_match(benchmark::State& state)
{
    const auto gt = random_events(static_cast<std::size_t>(state.range(0)), 240.0, 1);
    const auto pred = random_events(static_cast<std::size_t>(state.range(0)), 240.0, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(greedy_match(gt, pred, 0.1));
    }
}
BENCHMARK(bm_greedy_match)->Arg(1000)->Arg(10000);

void bm_onset_envelope(benchmark::State& state)
{
    const AudioBuffer audio = click_track(static_cast<double>(state.range(0)), 120.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(onset_envelope(audio));
    }
}
BENCHMARK(bm_onset_envelope)->Arg(30)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_offset_search(benchmark::State& state)
{
    Chart gt;
    gt.tracks[Instrument::Drums]
        = Track { Instrument::Drums, random_events(2000, 240.0, 3) };
    Chart pred;
    pred.tracks[Instrument::Drums]
        = Track { Instrument::Drums, random_events(2000, 240.0, 4) };
    for (auto _ : state) {
        benchmark::DoNotOptimize(offset_search(gt, pred, 0.1));
    }
}
BENCHMARK(bm_offset_search)->Unit(benchmark::kMillisecond);

void bm_wilcoxon_exact(benchmark::State& state)
{
    std::mt19937 rng(5);
    std::normal_distribution<double> delta_dist(0.0, 0.01);
    std::vector<double> deltas(static_cast<std::size_t>(state.range(0)));
    for (auto& delta : deltas) {
        delta = delta_dist(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(wilcoxon_signed_rank(deltas, WilcoxonMode::Exact));
    }
}
BENCHMARK(bm_wilcoxon_exact)->Arg(12)->Arg(20);

void bm_refine_bpm(benchmark::State& state)
{
    const AudioBuffer audio = click_track(60.0, 127.3);
    const OnsetEnvelope envelope = onset_envelope(audio);
    const double coarse = estimate_bpm_coarse(envelope);
    for (auto _ : state) {
        benchmark::DoNotOptimize(refine_bpm(envelope, coarse));
    }
}
BENCHMARK(bm_refine_bpm)->Unit(benchmark::kMillisecond);

}

BENCHMARK_MAIN();
