#ifndef CHARTKIT_AUDIO_HPP
#define CHARTKIT_AUDIO_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace chartkit {

inline constexpr int kInternalSampleRate = 22050;
inline constexpr std::size_t kStftFrameSize = 2048;
inline constexpr std::size_t kStftHopSize = 512;

// Mono audio, samples in [-1, 1].
struct AudioBuffer {
    std::vector<float> samples;
    int sample_rate = kInternalSampleRate;

    double duration() const
    {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

// RIFF/WAVE decoder: PCM 16/24/32-bit and IEEE float32, 1 or 2 channels.
// Stereo is averaged to mono; output is resampled to kInternalSampleRate by
// linear interpolation. Throws ParseError on malformed or unsupported input.
AudioBuffer decode_wav(const std::string& path);
AudioBuffer decode_wav_bytes(const std::uint8_t* data, std::size_t size);

// Mono PCM16 encoder, written at the buffer's own sample rate. Samples are
// clamped to [-1, 1] before quantisation.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& audio);

struct RmsWindow {
    double start_time = 0.0;
    double rms = 0.0;
};

// RMS over [t, t + window) at hop intervals; a final partial window is
// dropped. Throws Error on non-positive window or hop.
std::vector<RmsWindow> windowed_rms(const AudioBuffer& audio, double window_seconds,
    double hop_seconds);

// Population mean and standard deviation of the mix samples, used to place
// stems on a common loudness scale.
struct MixStats {
    double mean = 0.0;
    double stddev = 1.0;
};

MixStats compute_mix_stats(const AudioBuffer& mix);

// (x - mean) / stddev per sample. Throws Error unless stats.stddev > 0.
AudioBuffer normalize_by_mix(const AudioBuffer& stem, const MixStats& stats);

// Novelty curve from log-compressed spectral flux. Frame k summarises the
// spectrum change over the FFT window ending at time_at(k); values are
// locally mean-subtracted and clamped at zero.
struct OnsetEnvelope {
    std::vector<float> values;
    double hop_seconds = 0.0;
    double start_time = 0.0;

    double time_at(std::size_t frame) const { return start_time + frame * hop_seconds; }
};

OnsetEnvelope onset_envelope(const AudioBuffer& audio);

struct OnsetPeak {
    double time = 0.0;
    double weight = 0.0;
    std::size_t frame = 0;
};

// Local maxima of the envelope above a moving median plus 0.3x the global
// standard deviation, with a 30 ms refractory period. Peak times are frame
// times; weights are envelope values.
std::vector<OnsetPeak> pick_peaks(const OnsetEnvelope& envelope);

// Per-frame sums of STFT magnitudes inside each [lo_hz, hi_hz) band, with
// the same frame timing as onset_envelope.
std::vector<std::vector<float>> stft_band_sums(const AudioBuffer& audio,
    const std::vector<std::pair<double, double>>& bands_hz);

}

#endif
