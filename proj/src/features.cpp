#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "qawa/audio.hpp"
#include "qawa/error.hpp"
#include "qawa/fft.hpp"

namespace qawa {

namespace {

struct FrameGrid {
    size_t frame_len;
    size_t hop;
    size_t count;
};

FrameGrid frame_grid(const AudioBuffer& b, const FeatureConfig& cfg) {
    if (b.channels != 1) throw ValidationError("features: mono input required");
    FrameGrid g{};
    g.frame_len = static_cast<size_t>(std::llround(cfg.window_s * b.sample_rate));
    g.hop = static_cast<size_t>(std::llround(cfg.hop_s * b.sample_rate));
    if (g.frame_len == 0 || g.hop == 0) throw ValidationError("features: window/hop too small");
    if (b.samples.size() < g.frame_len)
        throw ValidationError("features: buffer shorter than one analysis window");
    g.count = (b.samples.size() - g.frame_len) / g.hop + 1;
    return g;
}

std::vector<double> hamming(size_t n) {
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
    return w;
}

// One-sided squared-magnitude FFT of a windowed frame zero-padded to fft_size.
std::vector<double> frame_spectrum(const AudioBuffer& b, size_t start, size_t frame_len,
                                   const std::vector<double>& window, int fft_size) {
    std::vector<std::complex<double>> buf(static_cast<size_t>(fft_size), {0.0, 0.0});
    for (size_t i = 0; i < frame_len; ++i)
        buf[i] = {static_cast<double>(b.samples[start + i]) * window[i], 0.0};
    fft_inplace(buf);
    std::vector<double> mag2(static_cast<size_t>(fft_size) / 2 + 1);
    for (size_t k = 0; k < mag2.size(); ++k) mag2[k] = std::norm(buf[k]);
    return mag2;
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular mel filterbank as bin weights [filter][bin].
std::vector<std::vector<double>> mel_filterbank(const FeatureConfig& cfg, int sample_rate) {
    const int bins = cfg.fft_size / 2 + 1;
    const double mel_lo = hz_to_mel(cfg.mel_fmin);
    const double mel_hi = hz_to_mel(std::min(cfg.mel_fmax, sample_rate / 2.0));
    std::vector<double> edges(static_cast<size_t>(cfg.mel_filters) + 2);
    for (size_t i = 0; i < edges.size(); ++i)
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                          static_cast<double>(cfg.mel_filters + 1));
    std::vector<std::vector<double>> fb(static_cast<size_t>(cfg.mel_filters),
                                        std::vector<double>(static_cast<size_t>(bins), 0.0));
    for (int m = 0; m < cfg.mel_filters; ++m) {
        const double lo = edges[static_cast<size_t>(m)];
        const double mid = edges[static_cast<size_t>(m) + 1];
        const double hi = edges[static_cast<size_t>(m) + 2];
        for (int k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / cfg.fft_size;
            if (f <= lo || f >= hi) continue;
            fb[static_cast<size_t>(m)][static_cast<size_t>(k)] =
                f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
        }
    }
    return fb;
}

// +-2 frame regression deltas with edge replication.
void append_deltas(Matrix& m, size_t src_col0, size_t dst_col0, size_t width) {
    const long rows = static_cast<long>(m.rows);
    for (long t = 0; t < rows; ++t) {
        for (size_t c = 0; c < width; ++c) {
            double acc = 0.0;
            for (long n = 1; n <= 2; ++n) {
                const long lo = std::max<long>(0, t - n);
                const long hi = std::min<long>(rows - 1, t + n);
                acc += static_cast<double>(n) *
                       (m.at(static_cast<size_t>(hi), src_col0 + c) -
                        m.at(static_cast<size_t>(lo), src_col0 + c));
            }
            m.at(static_cast<size_t>(t), dst_col0 + c) = acc / 10.0;  // 2*(1^2+2^2)
        }
    }
}

void normalize_columns(Matrix& m) {
    for (size_t c = 0; c < m.cols; ++c) {
        double mean = 0.0;
        for (size_t r = 0; r < m.rows; ++r) mean += m.at(r, c);
        mean /= static_cast<double>(m.rows);
        double var = 0.0;
        for (size_t r = 0; r < m.rows; ++r) {
            const double d = m.at(r, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(m.rows);
        const double sd = std::sqrt(var);
        if (sd < 1e-12) {
            for (size_t r = 0; r < m.rows; ++r) m.at(r, c) = 0.0;
        } else {
            for (size_t r = 0; r < m.rows; ++r) m.at(r, c) = (m.at(r, c) - mean) / sd;
        }
    }
}

}  // namespace

Matrix mfcc(const AudioBuffer& b, const FeatureConfig& cfg) {
    const FrameGrid g = frame_grid(b, cfg);
    const auto window = hamming(g.frame_len);
    const auto fb = mel_filterbank(cfg, b.sample_rate);
    const auto n_static = static_cast<size_t>(cfg.n_mfcc);
    const size_t width = n_static * static_cast<size_t>(1 + cfg.derivative_orders);

    Matrix m;
    m.rows = g.count;
    m.cols = width;
    m.data.assign(m.rows * m.cols, 0.0);

    const auto n_mel = static_cast<size_t>(cfg.mel_filters);
    std::vector<double> logmel(n_mel);
    for (size_t t = 0; t < g.count; ++t) {
        const auto spec = frame_spectrum(b, t * g.hop, g.frame_len, window, cfg.fft_size);
        for (size_t f = 0; f < n_mel; ++f) {
            double e = 0.0;
            for (size_t k = 0; k < spec.size(); ++k) e += fb[f][k] * spec[k];
            logmel[f] = std::log(std::max(e, 1e-10));
        }
        // orthonormal DCT-II, first n_mfcc coefficients
        for (size_t i = 0; i < n_static; ++i) {
            double acc = 0.0;
            for (size_t f = 0; f < n_mel; ++f)
                acc += logmel[f] * std::cos(M_PI * static_cast<double>(i) *
                                            (static_cast<double>(f) + 0.5) /
                                            static_cast<double>(n_mel));
            const double scale = i == 0 ? std::sqrt(1.0 / static_cast<double>(n_mel))
                                        : std::sqrt(2.0 / static_cast<double>(n_mel));
            m.at(t, i) = scale * acc;
        }
    }

    if (cfg.derivative_orders >= 1) append_deltas(m, 0, n_static, n_static);
    if (cfg.derivative_orders >= 2) append_deltas(m, n_static, 2 * n_static, n_static);
    if (cfg.normalize_per_sequence) normalize_columns(m);
    return m;
}

Matrix power_spectrum(const AudioBuffer& b, const FeatureConfig& cfg) {
    const FrameGrid g = frame_grid(b, cfg);
    const auto window = hamming(g.frame_len);
    const auto bins = static_cast<size_t>(cfg.fft_size) / 2 + 1;

    Matrix m;
    m.rows = g.count;
    m.cols = bins;
    m.data.assign(m.rows * m.cols, 0.0);
    const double n = cfg.fft_size;
    for (size_t t = 0; t < g.count; ++t) {
        auto spec = frame_spectrum(b, t * g.hop, g.frame_len, window, cfg.fft_size);
        // Scale so the one-sided sum equals the windowed frame's energy
        // (Parseval); interior bins carry both spectral halves.
        for (size_t k = 0; k < bins; ++k) {
            const double fold = (k == 0 || k == bins - 1) ? 1.0 : 2.0;
            m.at(t, k) = fold * spec[k] / n;
        }
    }
    return m;
}

void write_feature_dump(const Matrix& m, const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write feature dump: " + path);
    char header[16] = {'Q', 'A', 'W', 'F'};
    const auto rows = static_cast<uint32_t>(m.rows);
    const auto cols = static_cast<uint32_t>(m.cols);
    for (int i = 0; i < 4; ++i) header[4 + i] = static_cast<char>((rows >> (8 * i)) & 0xff);
    for (int i = 0; i < 4; ++i) header[8 + i] = static_cast<char>((cols >> (8 * i)) & 0xff);
    out.write(header, 16);
    std::vector<float> row(m.cols);
    for (size_t r = 0; r < m.rows; ++r) {
        for (size_t c = 0; c < m.cols; ++c) row[c] = static_cast<float>(m.at(r, c));
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
}

Matrix read_feature_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open feature dump: " + path);
    char header[16];
    in.read(header, 16);
    if (in.gcount() != 16 || std::memcmp(header, "QAWF", 4) != 0)
        throw DataError(path + ": not a QAWF feature dump");
    auto rd_u32 = [&](int off) {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<unsigned char>(header[off + i])) << (8 * i);
        return v;
    };
    Matrix m;
    m.rows = rd_u32(4);
    m.cols = rd_u32(8);
    m.data.resize(m.rows * m.cols);
    std::vector<float> row(m.cols);
    for (size_t r = 0; r < m.rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (static_cast<size_t>(in.gcount()) != row.size() * sizeof(float))
            throw DataError(path + ": truncated feature dump");
        for (size_t c = 0; c < m.cols; ++c) m.at(r, c) = row[c];
    }
    return m;
}

}  // namespace qawa
