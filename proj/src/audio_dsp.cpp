#include <algorithm>
#include <array>
#include <cmath>

#include "qawa/audio.hpp"
#include "qawa/error.hpp"

namespace qawa {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

// Zeroth-order modified Bessel function, power series.
double bessel_i0(double x) {
    double sum = 1.0, term = 1.0;
    const double hx = x / 2.0;
    for (int k = 1; k < 64; ++k) {
        term *= (hx / k) * (hx / k);
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

constexpr double kKaiserBeta = 8.6;
constexpr int kSincTaps = 16;  // per side, in output-domain samples

// Kaiser window sampled on |v| in [0,1], linearly interpolated per tap.
class KaiserTable {
public:
    KaiserTable() {
        const double i0b = bessel_i0(kKaiserBeta);
        for (size_t i = 0; i < kSize; ++i) {
            const double v = static_cast<double>(i) / (kSize - 1);
            table_[i] = bessel_i0(kKaiserBeta * std::sqrt(1.0 - v * v)) / i0b;
        }
    }
    double operator()(double v) const {
        v = std::abs(v);
        if (v >= 1.0) return 0.0;
        const double pos = v * (kSize - 1);
        const auto i = static_cast<size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return table_[i] + (table_[std::min(i + 1, kSize - 1)] - table_[i]) * frac;
    }

private:
    static constexpr size_t kSize = 4096;
    std::array<double, kSize> table_{};
};

// Interpolate x at fractional positions i*step with a Kaiser-windowed sinc
// low-passed to `cutoff` of the input Nyquist.
std::vector<float> sinc_interpolate(const std::vector<float>& x, size_t out_len,
                                    double step, double cutoff) {
    static const KaiserTable kaiser;
    const double half = kSincTaps / cutoff;
    std::vector<float> y(out_len);
    const auto n = static_cast<long>(x.size());
    for (size_t i = 0; i < out_len; ++i) {
        const double t = static_cast<double>(i) * step;
        // Exact pass-through when the position is an integer and no band
        // limiting applies; keeps unit-coefficient operations bit-clean.
        if (cutoff >= 1.0) {
            const double nearest = std::round(t);
            if (std::abs(t - nearest) < 1e-12 && nearest >= 0 && nearest < static_cast<double>(n)) {
                y[i] = x[static_cast<size_t>(nearest)];
                continue;
            }
        }
        const long j0 = static_cast<long>(std::ceil(t - half));
        const long j1 = static_cast<long>(std::floor(t + half));
        double acc = 0.0, wsum = 0.0;
        for (long j = j0; j <= j1; ++j) {
            const double d = t - static_cast<double>(j);
            const double w = cutoff * sinc(cutoff * d) * kaiser(d / half);
            wsum += w;
            if (j >= 0 && j < n) acc += w * static_cast<double>(x[static_cast<size_t>(j)]);
        }
        y[i] = static_cast<float>(wsum != 0.0 ? acc / wsum : 0.0);
    }
    return y;
}

void check_policy(const SegmentationPolicy& p) {
    if (p.max_segment_s <= 0) throw ValidationError("max_segment_s must be positive");
    if (p.boundary_search_window_s >= p.max_segment_s)
        throw ValidationError("boundary search window must be smaller than max_segment_s");
    if (p.frame_s <= 0) throw ValidationError("frame_s must be positive");
}

double rms(const std::vector<float>& x, size_t begin, size_t end) {
    if (end <= begin) return 0.0;
    double acc = 0.0;
    for (size_t i = begin; i < end; ++i) acc += static_cast<double>(x[i]) * x[i];
    return std::sqrt(acc / static_cast<double>(end - begin));
}

}  // namespace

AudioBuffer to_mono(const AudioBuffer& b) {
    if (b.channels < 1) throw ValidationError("to_mono: buffer has no channels");
    if (b.channels == 1) return b;
    AudioBuffer out;
    out.sample_rate = b.sample_rate;
    out.channels = 1;
    const size_t frames = b.frames();
    out.samples.resize(frames);
    const auto ch = static_cast<size_t>(b.channels);
    for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (size_t c = 0; c < ch; ++c) acc += static_cast<double>(b.samples[i * ch + c]);
        out.samples[i] = static_cast<float>(acc / static_cast<double>(ch));
    }
    return out;
}

AudioBuffer resample(const AudioBuffer& b, int target_hz) {
    if (b.channels != 1) throw ValidationError("resample: mono input required");
    if (target_hz <= 0) throw ValidationError("resample: target rate must be positive");
    if (target_hz == b.sample_rate) return b;

    const double ratio = static_cast<double>(target_hz) / b.sample_rate;
    const auto out_len = static_cast<size_t>(
        std::llround(static_cast<double>(b.samples.size()) * ratio));
    AudioBuffer out;
    out.sample_rate = target_hz;
    out.channels = 1;
    out.samples = sinc_interpolate(b.samples, out_len, 1.0 / ratio, std::min(1.0, ratio));
    return out;
}

std::vector<AudioBuffer> segment(const AudioBuffer& b, const SegmentationPolicy& p) {
    if (b.channels != 1) throw ValidationError("segment: mono input required");
    check_policy(p);
    const auto max_len = static_cast<size_t>(std::llround(p.max_segment_s * b.sample_rate));
    const auto frame_len =
        std::max<size_t>(1, static_cast<size_t>(std::llround(p.frame_s * b.sample_rate)));
    const size_t total = b.samples.size();

    std::vector<AudioBuffer> segments;
    if (total <= max_len) {
        segments.push_back(b);
        return segments;
    }

    auto slice = [&](size_t begin, size_t end) {
        AudioBuffer s;
        s.sample_rate = b.sample_rate;
        s.channels = 1;
        s.samples.assign(b.samples.begin() + static_cast<long>(begin),
                         b.samples.begin() + static_cast<long>(end));
        return s;
    };

    const auto max_back =
        static_cast<size_t>(std::llround(p.boundary_search_window_s * b.sample_rate));
    size_t pos = 0;
    while (total - pos > max_len) {
        const size_t nominal = pos + max_len;
        // Candidate cuts step back one frame at a time; the lowest-RMS frame
        // around the cut wins, later candidates win ties.
        size_t best_cut = nominal;
        double best_rms = -1.0;
        for (size_t back = 0; back <= max_back; back += frame_len) {
            const size_t cut = nominal - back;
            if (cut <= pos) break;
            const size_t lo = cut >= frame_len / 2 ? cut - frame_len / 2 : 0;
            const size_t hi = std::min(total, lo + frame_len);
            const double r = rms(b.samples, lo, hi);
            if (best_rms < 0.0 || r < best_rms) {
                best_rms = r;
                best_cut = cut;
            }
        }
        segments.push_back(slice(pos, best_cut));
        pos = best_cut;
    }
    segments.push_back(slice(pos, total));
    return segments;
}

double voiced_ratio(const AudioBuffer& b, const SegmentationPolicy& p) {
    if (b.channels != 1) throw ValidationError("voiced_ratio: mono input required");
    check_policy(p);
    const auto frame_len =
        std::max<size_t>(1, static_cast<size_t>(std::llround(p.frame_s * b.sample_rate)));
    const size_t total = b.samples.size();
    if (total == 0) return 0.0;
    size_t frames = 0, voiced = 0;
    for (size_t pos = 0; pos < total; pos += frame_len) {
        const size_t end = std::min(total, pos + frame_len);
        ++frames;
        if (rms(b.samples, pos, end) > p.silence_rms_threshold) ++voiced;
    }
    return static_cast<double>(voiced) / static_cast<double>(frames);
}

AudioBuffer speed_perturb(const AudioBuffer& b, double coeff, const SpeedRange& range) {
    if (b.channels != 1) throw ValidationError("speed_perturb: mono input required");
    if (coeff < range.lo || coeff > range.hi)
        throw ValidationError("speed coefficient " + std::to_string(coeff) +
                              " outside configured range [" + std::to_string(range.lo) + ", " +
                              std::to_string(range.hi) + "]");
    AudioBuffer out;
    out.sample_rate = b.sample_rate;
    out.channels = 1;
    const auto out_len =
        static_cast<size_t>(std::llround(static_cast<double>(b.samples.size()) / coeff));
    out.samples = sinc_interpolate(b.samples, out_len, coeff, std::min(1.0, 1.0 / coeff));
    return out;
}

}  // namespace qawa
