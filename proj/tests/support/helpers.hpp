#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "qawa/audio.hpp"
#include "qawa/rng.hpp"

namespace testutil {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
struct TmpDir {
    fs::path path;

    TmpDir() {
        static std::atomic<uint64_t> counter{0};
        const auto base = fs::temp_directory_path();
        for (int attempt = 0; attempt < 1000; ++attempt) {
            auto p = base / ("qawa-test-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter.fetch_add(1)));
            std::error_code ec;
            if (fs::create_directory(p, ec)) {
                path = p;
                return;
            }
        }
        throw std::runtime_error("cannot create scratch directory");
    }
    ~TmpDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TmpDir(const TmpDir&) = delete;
    TmpDir& operator=(const TmpDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << content;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Runs f, expecting it to throw E; returns the message (or a marker).
template <class E, class F>
std::string error_message(F&& f) {
    try {
        f();
    } catch (const E& e) {
        return e.what();
    } catch (const std::exception& e) {
        return std::string("<wrong exception type: ") + e.what() + ">";
    }
    return "<no exception>";
}

inline bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

inline qawa::AudioBuffer sine(double freq, double seconds, uint32_t rate = 16000,
                              double amp = 0.5) {
    qawa::AudioBuffer b;
    b.sample_rate = rate;
    const size_t n = static_cast<size_t>(std::llround(seconds * rate));
    b.samples.resize(n);
    for (size_t i = 0; i < n; ++i)
        b.samples[i] = static_cast<float>(
            amp * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / rate));
    return b;
}

// Sine under a Hann envelope: zero at the edges, so resampling artifacts at
// the boundaries stay negligible.
inline qawa::AudioBuffer hann_sine(double freq, double seconds, uint32_t rate = 16000,
                                   double amp = 0.5) {
    qawa::AudioBuffer b = sine(freq, seconds, rate, amp);
    const size_t n = b.samples.size();
    for (size_t i = 0; i < n; ++i) {
        const double w =
            0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / (n - 1));
        b.samples[i] = static_cast<float>(b.samples[i] * w);
    }
    return b;
}

inline qawa::AudioBuffer noise(double seconds, uint64_t seed, uint32_t rate = 16000,
                               double amp = 0.5) {
    qawa::AudioBuffer b;
    b.sample_rate = rate;
    const size_t n = static_cast<size_t>(std::llround(seconds * rate));
    b.samples.resize(n);
    qawa::Rng rng(seed);
    for (auto& s : b.samples)
        s = static_cast<float>(amp * (2.0 * rng.unit() - 1.0));
    return b;
}

inline std::string fixture_dir() { return QAWA_FIXTURE_DIR; }
inline std::string data_dir() { return QAWA_DATA_DIR; }
inline std::string golden_dir() { return QAWA_GOLDEN_DIR; }

}  // namespace testutil
