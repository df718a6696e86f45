#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qawa {

// Decoded PCM audio. Samples are interleaved, amplitudes in [-1, 1].
struct AudioBuffer {
    std::vector<float> samples;
    int sample_rate = 16000;
    int channels = 1;

    size_t frames() const {
        return channels > 0 ? samples.size() / static_cast<size_t>(channels) : 0;
    }
    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(frames()) / sample_rate : 0.0;
    }
    bool is_canonical() const { return channels == 1 && sample_rate == 16000; }
};

constexpr int kCanonicalRate = 16000;

// RIFF/WAVE, PCM 16-bit or float32. Encoding always writes 16-bit PCM
// little-endian; decode(encode(b)) matches b within one 16-bit LSB.
AudioBuffer decode_wav(const std::string& path);
void encode_wav(const AudioBuffer& b, const std::string& path);

AudioBuffer to_mono(const AudioBuffer& b);

// Band-limited (windowed-sinc, Kaiser window, 16 taps per side) resampling.
AudioBuffer resample(const AudioBuffer& b, int target_hz);

struct SegmentationPolicy {
    double max_segment_s = 30.0;
    double boundary_search_window_s = 2.0;
    double silence_rms_threshold = 0.01;
    double frame_s = 0.025;
};

// Split into segments of at most max_segment_s each. Cut points prefer the
// minimum-RMS frame within the search window before each nominal cut, so
// concatenating the segments reproduces the input exactly.
std::vector<AudioBuffer> segment(const AudioBuffer& b, const SegmentationPolicy& p);

// Fraction of frames whose RMS exceeds the silence threshold.
double voiced_ratio(const AudioBuffer& b, const SegmentationPolicy& p);

struct SpeedRange {
    double lo = 0.85;
    double hi = 1.15;
};

// Playback-rate change: output duration = input duration / coeff, pitch
// shifting along with tempo.
AudioBuffer speed_perturb(const AudioBuffer& b, double coeff,
                          const SpeedRange& range = {});

// Row-major feature matrix.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

struct FeatureConfig {
    int n_mfcc = 13;
    double window_s = 0.025;
    double hop_s = 0.010;
    int derivative_orders = 2;
    int fft_size = 512;  // power spectrum has fft_size/2 + 1 = 257 bins
    int mel_filters = 26;
    double mel_fmin = 0.0;
    double mel_fmax = 8000.0;
    bool normalize_per_sequence = true;
};

// 13 static MFCCs per frame plus delta and delta-delta columns; optional
// per-sequence normalization of every column to mean 0, std 1.
Matrix mfcc(const AudioBuffer& b, const FeatureConfig& cfg);

// Per-frame squared-magnitude spectrum (Hamming window, FFT 512, 257 bins),
// scaled so the per-frame spectral sum equals the windowed-signal energy.
Matrix power_spectrum(const AudioBuffer& b, const FeatureConfig& cfg);

// Binary matrix dump: 16-byte header (magic "QAWF", rows and cols as
// little-endian uint32, 4 reserved zero bytes), then row-major float32.
void write_feature_dump(const Matrix& m, const std::string& path);
Matrix read_feature_dump(const std::string& path);

}  // namespace qawa
