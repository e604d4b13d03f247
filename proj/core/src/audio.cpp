#include "chartkit/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    constexpr std::size_t kFftSize = kStftFrameSize;
    constexpr std::size_t kHopSize = kStftHopSize;
    constexpr double kLogCompression = 1000.0;
    constexpr double kLocalMeanWindowSeconds = 0.5;
    constexpr double kPeakMedianWindowSeconds = 0.5;
    constexpr double kPeakThresholdStdFraction = 0.3;
    constexpr double kPeakRefractorySeconds = 0.030;

    std::uint32_t read_u32le(const std::uint8_t* p)
    {
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8)
            | (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }

    std::uint16_t read_u16le(const std::uint8_t* p)
    {
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }

    std::vector<float> resample_linear(const std::vector<float>& in, int src_rate, int dst_rate)
    {
        if (src_rate == dst_rate || in.empty()) {
            return in;
        }
        const double ratio = static_cast<double>(src_rate) / dst_rate;
        const std::size_t out_size
            = static_cast<std::size_t>(std::floor((in.size() - 1) / ratio)) + 1;
        std::vector<float> out(out_size);
        for (std::size_t i = 0; i < out_size; ++i) {
            const double pos = i * ratio;
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, in.size() - 1);
            const double frac = pos - lo;
            out[i] = static_cast<float>((1.0 - frac) * in[lo] + frac * in[hi]);
        }
        return out;
    }

    // Iterative radix-2 FFT with precomputed twiddles; sizes are powers of two.
    class Fft {
    public:
        explicit Fft(std::size_t n)
            : m_size(n)
        {
            if (n == 0 || (n & (n - 1)) != 0) {
                throw Error("FFT size must be a power of two");
            }
            m_bit_reverse.resize(n);
            std::size_t log2n = 0;
            while ((std::size_t { 1 } << log2n) < n) {
                ++log2n;
            }
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t r = 0;
                for (std::size_t b = 0; b < log2n; ++b) {
                    r |= ((i >> b) & 1) << (log2n - 1 - b);
                }
                m_bit_reverse[i] = r;
            }
            m_twiddles.resize(n / 2);
            for (std::size_t i = 0; i < n / 2; ++i) {
                const double angle = -2.0 * std::numbers::pi * i / n;
                m_twiddles[i] = { std::cos(angle), std::sin(angle) };
            }
        }

        void forward(std::vector<std::complex<double>>& data) const
        {
            for (std::size_t i = 0; i < m_size; ++i) {
                const std::size_t j = m_bit_reverse[i];
                if (i < j) {
                    std::swap(data[i], data[j]);
                }
            }
            for (std::size_t len = 2; len <= m_size; len <<= 1) {
                const std::size_t stride = m_size / len;
                for (std::size_t start = 0; start < m_size; start += len) {
                    for (std::size_t k = 0; k < len / 2; ++k) {
                        const auto w = m_twiddles[k * stride];
                        const auto odd = data[start + k + len / 2] * w;
                        const auto even = data[start + k];
                        data[start + k] = even + odd;
                        data[start + k + len / 2] = even - odd;
                    }
                }
            }
        }

    private:
        std::size_t m_size;
        std::vector<std::size_t> m_bit_reverse;
        std::vector<std::complex<double>> m_twiddles;
    };

    // Walks STFT frames of the zero-pre-padded signal. Frame k covers the
    // kFftSize samples ending at sample k * kHopSize, so frame times align
    // with the moment the analysed content has just been heard.
    template <typename FrameFn>
    void for_each_stft_frame(const AudioBuffer& audio, FrameFn&& on_frame)
    {
        static const Fft fft(kFftSize);
        static const std::vector<double> window = [] {
            std::vector<double> w(kFftSize);
            for (std::size_t n = 0; n < kFftSize; ++n) {
                w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / (kFftSize - 1)));
            }
            return w;
        }();

        const std::size_t num_frames = audio.samples.size() / kHopSize + 1;
        std::vector<std::complex<double>> buffer(kFftSize);
        std::vector<double> magnitudes(kFftSize / 2 + 1);
        for (std::size_t k = 0; k < num_frames; ++k) {
            const std::int64_t frame_start
                = static_cast<std::int64_t>(k * kHopSize) - static_cast<std::int64_t>(kFftSize);
            for (std::size_t n = 0; n < kFftSize; ++n) {
                const std::int64_t idx = frame_start + static_cast<std::int64_t>(n);
                const double sample = (idx >= 0
                                          && idx < static_cast<std::int64_t>(audio.samples.size()))
                    ? audio.samples[static_cast<std::size_t>(idx)]
                    : 0.0;
                buffer[n] = sample * window[n];
            }
            fft.forward(buffer);
            for (std::size_t b = 0; b <= kFftSize / 2; ++b) {
                magnitudes[b] = std::abs(buffer[b]);
            }
            on_frame(k, magnitudes);
        }
    }

    double median_of(std::vector<float> values)
    {
        if (values.empty()) {
            return 0.0;
        }
        const std::size_t mid = values.size() / 2;
        std::nth_element(values.begin(), values.begin() + mid, values.end());
        double result = values[mid];
        if (values.size() % 2 == 0) {
            std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
            result = 0.5 * (result + values[mid - 1]);
        }
        return result;
    }

}

AudioBuffer decode_wav(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw ParseError("cannot open WAV file: " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
        std::istreambuf_iterator<char>());
    try {
        return decode_wav_bytes(bytes.data(), bytes.size());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

AudioBuffer decode_wav_bytes(const std::uint8_t* data, std::size_t size)
{
    if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0) {
        throw ParseError("not a RIFF/WAVE file");
    }

    int format_code = 0;
    int channels = 0;
    int sample_rate = 0;
    int bits_per_sample = 0;
    bool have_fmt = false;
    const std::uint8_t* samples_begin = nullptr;
    std::size_t samples_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= size) {
        const std::uint32_t chunk_size = read_u32le(data + pos + 4);
        const std::uint8_t* chunk = data + pos + 8;
        if (pos + 8 + chunk_size > size) {
            throw ParseError("truncated WAV chunk");
        }
        if (std::memcmp(data + pos, "fmt ", 4) == 0) {
            if (chunk_size < 16) {
                throw ParseError("fmt chunk too small");
            }
            format_code = read_u16le(chunk);
            channels = read_u16le(chunk + 2);
            sample_rate = static_cast<int>(read_u32le(chunk + 4));
            bits_per_sample = read_u16le(chunk + 14);
            if (format_code == 0xFFFE) {
                if (chunk_size < 40) {
                    throw ParseError("extensible fmt chunk too small");
                }
                format_code = read_u16le(chunk + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(data + pos, "data", 4) == 0) {
            samples_begin = chunk;
            samples_size = chunk_size;
        }
        pos += 8 + chunk_size + (chunk_size % 2);
    }

    if (!have_fmt || samples_begin == nullptr) {
        throw ParseError("WAV file missing fmt or data chunk");
    }
    if (channels < 1 || channels > 2) {
        throw ParseError("unsupported channel count: " + std::to_string(channels));
    }
    if (sample_rate <= 0) {
        throw ParseError("invalid sample rate");
    }

    const std::size_t bytes_per_sample = static_cast<std::size_t>(bits_per_sample) / 8;
    const bool is_float = format_code == 3;
    const bool is_pcm = format_code == 1;
    if (is_float && bits_per_sample != 32) {
        throw ParseError("only 32-bit float WAV is supported");
    }
    if (is_pcm && bits_per_sample != 16 && bits_per_sample != 24 && bits_per_sample != 32) {
        throw ParseError("unsupported PCM bit depth: " + std::to_string(bits_per_sample));
    }
    if (!is_float && !is_pcm) {
        throw ParseError("unsupported WAV format code: " + std::to_string(format_code));
    }

    const std::size_t frame_bytes = bytes_per_sample * channels;
    if (frame_bytes == 0) {
        throw ParseError("invalid WAV frame size");
    }
    const std::size_t num_frames = samples_size / frame_bytes;

    std::vector<float> mono(num_frames);
    for (std::size_t i = 0; i < num_frames; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
            const std::uint8_t* p = samples_begin + i * frame_bytes + c * bytes_per_sample;
            double sample = 0.0;
            if (is_float) {
                float f;
                std::memcpy(&f, p, 4);
                sample = f;
            } else if (bits_per_sample == 16) {
                const auto v = static_cast<std::int16_t>(read_u16le(p));
                sample = v / 32768.0;
            } else if (bits_per_sample == 24) {
                std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
                if (v & 0x800000) {
                    v -= 0x1000000;
                }
                sample = v / 8388608.0;
            } else {
                const auto v = static_cast<std::int32_t>(read_u32le(p));
                sample = v / 2147483648.0;
            }
            acc += sample;
        }
        mono[i] = static_cast<float>(std::clamp(acc / channels, -1.0, 1.0));
    }

    AudioBuffer out;
    out.sample_rate = kInternalSampleRate;
    out.samples = resample_linear(mono, sample_rate, kInternalSampleRate);
    return out;
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& audio)
{
    const std::uint32_t data_size = static_cast<std::uint32_t>(audio.samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);

    auto push_u32 = [&out](std::uint32_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
        out.push_back((v >> 16) & 0xFF);
        out.push_back((v >> 24) & 0xFF);
    };
    auto push_u16 = [&out](std::uint16_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
    };
    auto push_tag = [&out](const char* tag) { out.insert(out.end(), tag, tag + 4); };

    push_tag("RIFF");
    push_u32(36 + data_size);
    push_tag("WAVE");
    push_tag("fmt ");
    push_u32(16);
    push_u16(1);
    push_u16(1);
    push_u32(static_cast<std::uint32_t>(audio.sample_rate));
    push_u32(static_cast<std::uint32_t>(audio.sample_rate) * 2);
    push_u16(2);
    push_u16(16);
    push_tag("data");
    push_u32(data_size);
    for (float sample : audio.samples) {
        const double clamped = std::clamp(static_cast<double>(sample), -1.0, 1.0);
        const auto v = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        push_u16(static_cast<std::uint16_t>(v));
    }
    return out;
}

std::vector<RmsWindow> windowed_rms(const AudioBuffer& audio, double window_seconds,
    double hop_seconds)
{
    if (window_seconds <= 0.0 || hop_seconds <= 0.0) {
        throw Error("window and hop must be positive");
    }
    const auto window_samples
        = static_cast<std::size_t>(std::llround(window_seconds * audio.sample_rate));
    const auto hop_samples
        = static_cast<std::size_t>(std::llround(hop_seconds * audio.sample_rate));
    if (window_samples == 0 || hop_samples == 0) {
        throw Error("window and hop must cover at least one sample");
    }

    std::vector<RmsWindow> out;
    for (std::size_t start = 0; start + window_samples <= audio.samples.size();
         start += hop_samples) {
        double sum_squares = 0.0;
        for (std::size_t i = start; i < start + window_samples; ++i) {
            sum_squares += static_cast<double>(audio.samples[i]) * audio.samples[i];
        }
        out.push_back(RmsWindow { static_cast<double>(start) / audio.sample_rate,
            std::sqrt(sum_squares / window_samples) });
    }
    return out;
}

MixStats compute_mix_stats(const AudioBuffer& mix)
{
    if (mix.samples.empty()) {
        throw Error("cannot compute mix stats of empty audio");
    }
    double sum = 0.0;
    for (float s : mix.samples) {
        sum += s;
    }
    const double mean = sum / mix.samples.size();
    double sum_sq = 0.0;
    for (float s : mix.samples) {
        const double d = s - mean;
        sum_sq += d * d;
    }
    return MixStats { mean, std::sqrt(sum_sq / mix.samples.size()) };
}

AudioBuffer normalize_by_mix(const AudioBuffer& stem, const MixStats& stats)
{
    if (!(stats.stddev > 0.0)) {
        throw Error("mix stddev must be positive");
    }
    AudioBuffer out;
    out.sample_rate = stem.sample_rate;
    out.samples.resize(stem.samples.size());
    for (std::size_t i = 0; i < stem.samples.size(); ++i) {
        out.samples[i] = static_cast<float>((stem.samples[i] - stats.mean) / stats.stddev);
    }
    return out;
}

OnsetEnvelope onset_envelope(const AudioBuffer& audio)
{
    std::vector<float> flux;
    std::vector<double> previous_log(kFftSize / 2 + 1, 0.0);
    for_each_stft_frame(audio, [&](std::size_t, const std::vector<double>& magnitudes) {
        double frame_flux = 0.0;
        for (std::size_t b = 0; b < magnitudes.size(); ++b) {
            const double log_mag = std::log1p(kLogCompression * magnitudes[b]);
            const double diff = log_mag - previous_log[b];
            if (diff > 0.0) {
                frame_flux += diff;
            }
            previous_log[b] = log_mag;
        }
        flux.push_back(static_cast<float>(frame_flux));
    });

    OnsetEnvelope env;
    env.hop_seconds = static_cast<double>(kHopSize) / audio.sample_rate;
    env.start_time = 0.0;

    // Subtract a centred moving average so sustained spectral motion does not
    // masquerade as onsets, then clamp at zero.
    const auto half = static_cast<std::size_t>(
        std::llround(0.5 * kLocalMeanWindowSeconds / env.hop_seconds));
    std::vector<double> prefix(flux.size() + 1, 0.0);
    for (std::size_t i = 0; i < flux.size(); ++i) {
        prefix[i + 1] = prefix[i] + flux[i];
    }
    env.values.resize(flux.size());
    for (std::size_t i = 0; i < flux.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(i + half, flux.size() - 1);
        const double mean = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
        env.values[i] = static_cast<float>(std::max(0.0, flux[i] - mean));
    }
    return env;
}

std::vector<OnsetPeak> pick_peaks(const OnsetEnvelope& envelope)
{
    const auto& v = envelope.values;
    if (v.size() < 3) {
        return {};
    }

    double sum = 0.0;
    for (float x : v) {
        sum += x;
    }
    const double mean = sum / v.size();
    double sum_sq = 0.0;
    for (float x : v) {
        const double d = x - mean;
        sum_sq += d * d;
    }
    const double delta = kPeakThresholdStdFraction * std::sqrt(sum_sq / v.size());

    const auto half = static_cast<std::size_t>(
        std::llround(0.5 * kPeakMedianWindowSeconds / envelope.hop_seconds));

    std::vector<OnsetPeak> peaks;
    double last_accepted = -1e18;
    std::vector<float> window_values;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        if (!(v[k] > v[k - 1] && v[k] >= v[k + 1])) {
            continue;
        }
        const std::size_t lo = k >= half ? k - half : 0;
        const std::size_t hi = std::min(k + half, v.size() - 1);
        window_values.assign(v.begin() + lo, v.begin() + hi + 1);
        if (v[k] <= median_of(std::move(window_values)) + delta) {
            continue;
        }
        const double t = envelope.time_at(k);
        if (t - last_accepted < kPeakRefractorySeconds) {
            continue;
        }
        peaks.push_back(OnsetPeak { t, v[k], k });
        last_accepted = t;
    }
    return peaks;
}

std::vector<std::vector<float>> stft_band_sums(const AudioBuffer& audio,
    const std::vector<std::pair<double, double>>& bands_hz)
{
    const double bin_hz = static_cast<double>(audio.sample_rate) / kFftSize;
    std::vector<std::pair<std::size_t, std::size_t>> bin_ranges;
    bin_ranges.reserve(bands_hz.size());
    for (const auto& [lo_hz, hi_hz] : bands_hz) {
        if (!(lo_hz >= 0.0 && hi_hz > lo_hz)) {
            throw Error("invalid frequency band");
        }
        const auto lo = static_cast<std::size_t>(std::ceil(lo_hz / bin_hz));
        const auto hi = std::min(static_cast<std::size_t>(std::floor(hi_hz / bin_hz)),
            kFftSize / 2);
        bin_ranges.emplace_back(lo, hi);
    }

    std::vector<std::vector<float>> out(bands_hz.size());
    for_each_stft_frame(audio, [&](std::size_t, const std::vector<double>& magnitudes) {
        for (std::size_t band = 0; band < bin_ranges.size(); ++band) {
            double total = 0.0;
            for (std::size_t b = bin_ranges[band].first; b <= bin_ranges[band].second; ++b) {
                total += magnitudes[b];
            }
            out[band].push_back(static_cast<float>(total));
        }
    });
    return out;
}

}
