#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qawa/audio.hpp"
#include "qawa/error.hpp"
#include "qawa/fft.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace qawa;
using testutil::TmpDir;
using testutil::contains;
using testutil::error_message;
using testutil::noise;
using testutil::sine;

TEST_CASE("mfcc frame count and width follow the window settings") {
    AudioBuffer b = sine(440.0, 1.0);
    Matrix m = mfcc(b, FeatureConfig{});
    // (16000 - 400) / 160 + 1 frames of 13 static + 13 delta + 13 delta-delta.
    CHECK(m.rows == 98);
    CHECK(m.cols == 39);
}

TEST_CASE("mfcc on silence is constant and unnormalized deltas vanish") {
    AudioBuffer b;
    b.sample_rate = 16000;
    b.samples.assign(8000, 0.0f);
    FeatureConfig cfg;
    cfg.normalize_per_sequence = false;
    Matrix m = mfcc(b, cfg);
    REQUIRE(m.rows > 2);
    for (size_t r = 1; r < m.rows; ++r)
        for (size_t c = 0; c < 13; ++c)
            CHECK(m.at(r, c) == doctest::Approx(m.at(0, c)));
    for (size_t r = 0; r < m.rows; ++r)
        for (size_t c = 13; c < 39; ++c)
            CHECK(m.at(r, c) == doctest::Approx(0.0));
}

TEST_CASE("mfcc separates spectrally distinct tones") {
    FeatureConfig cfg;
    cfg.normalize_per_sequence = false;
    Matrix a = mfcc(sine(1000.0, 0.5), cfg);
    Matrix b = mfcc(sine(4000.0, 0.5), cfg);
    REQUIRE(a.rows == b.rows);

    std::vector<double> ma(13, 0.0), mb(13, 0.0);
    for (size_t r = 0; r < a.rows; ++r)
        for (size_t c = 0; c < 13; ++c) {
            ma[c] += a.at(r, c) / static_cast<double>(a.rows);
            mb[c] += b.at(r, c) / static_cast<double>(b.rows);
        }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t c = 0; c < 13; ++c) {
        dot += ma[c] * mb[c];
        na += ma[c] * ma[c];
        nb += mb[c] * mb[c];
    }
    const double cosine = dot / std::sqrt(na * nb);
    CHECK(1.0 - cosine > 0.1);
}

TEST_CASE("mfcc normalization yields zero mean unit variance columns") {
    Matrix m = mfcc(noise(1.0, 55), FeatureConfig{});
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
        CHECK(std::abs(mean) < 1e-6);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
    }
}

TEST_CASE("mfcc rejects input shorter than one window") {
    AudioBuffer b;
    b.sample_rate = 16000;
    b.samples.assign(200, 0.1f);
    const auto msg = error_message<ValidationError>([&] { mfcc(b, FeatureConfig{}); });
    CHECK(contains(msg, "window"));
}

TEST_CASE("power spectrum of silence is zero") {
    AudioBuffer b;
    b.sample_rate = 16000;
    b.samples.assign(4000, 0.0f);
    Matrix m = power_spectrum(b, FeatureConfig{});
    CHECK(m.cols == 257);
    for (double v : m.data) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("power spectrum puts a 1 kHz tone in bin 32") {
    Matrix m = power_spectrum(sine(1000.0, 0.5), FeatureConfig{});
    REQUIRE(m.rows > 4);
    for (size_t r = 0; r < m.rows; ++r) {
        size_t best = 0;
        for (size_t c = 1; c < m.cols; ++c)
            if (m.at(r, c) > m.at(r, best)) best = c;
        CHECK(best == 32);  // 1000 / (16000/512)
    }
}

TEST_CASE("power spectrum preserves windowed energy") {
    AudioBuffer b = noise(0.2, 99);
    FeatureConfig cfg;
    Matrix m = power_spectrum(b, cfg);

    // Recompute the windowed energy of one frame directly.
    const size_t win = 400, hop = 160;
    for (size_t r : {size_t{0}, m.rows / 2, m.rows - 1}) {
        double energy = 0.0;
        for (size_t i = 0; i < win; ++i) {
            const double w =
                0.54 - 0.46 * std::cos(2.0 * M_PI * i / static_cast<double>(win - 1));
            const double s = b.samples[r * hop + i] * w;
            energy += s * s;
        }
        double sum = 0.0;
        for (size_t c = 0; c < m.cols; ++c) sum += m.at(r, c);
        CHECK(sum == doctest::Approx(energy).epsilon(1e-6));
    }
}

TEST_CASE("fft matches a direct transform") {
    Rng rng(4242);
    std::vector<double> x(256);
    for (auto& v : x) v = 2.0 * rng.unit() - 1.0;

    std::vector<std::complex<double>> buf(x.size());
    for (size_t i = 0; i < x.size(); ++i) buf[i] = {x[i], 0.0};
    fft_inplace(buf, false);

    const auto ref = testutil::naive_dft_mag(x);
    for (size_t k = 0; k <= x.size() / 2; ++k)
        CHECK(std::abs(buf[k]) == doctest::Approx(ref[k]).epsilon(1e-9));

    fft_inplace(buf, true);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(buf[i].real() == doctest::Approx(x[i]).epsilon(1e-9));

    std::vector<std::complex<double>> odd(100);
    CHECK_THROWS_AS(fft_inplace(odd, false), Error);
}

TEST_CASE("feature dump round trips through the binary format") {
    TmpDir tmp;
    Matrix m;
    m.rows = 7;
    m.cols = 5;
    m.data.resize(35);
    Rng rng(17);
    for (auto& v : m.data) v = 2.0 * rng.unit() - 1.0;

    write_feature_dump(m, tmp.file("f.qawf"));
    Matrix r = read_feature_dump(tmp.file("f.qawf"));
    REQUIRE(r.rows == 7);
    REQUIRE(r.cols == 5);
    for (size_t i = 0; i < m.data.size(); ++i)
        CHECK(r.data[i] == doctest::Approx(m.data[i]).epsilon(1e-6));

    const auto bytes = testutil::read_file(tmp.file("f.qawf"));
    CHECK(bytes.size() == 16 + 35 * 4);
    CHECK(bytes.substr(0, 4) == "QAWF");
}

TEST_CASE("feature dump rejects corrupt files") {
    TmpDir tmp;
    testutil::write_file(tmp.file("bad.qawf"), "NOPE1234");
    CHECK_THROWS_AS(read_feature_dump(tmp.file("bad.qawf")), DataError);

    Matrix m;
    m.rows = 2;
    m.cols = 2;
    m.data = {1.0, 2.0, 3.0, 4.0};
    write_feature_dump(m, tmp.file("t.qawf"));
    auto bytes = testutil::read_file(tmp.file("t.qawf"));
    testutil::write_file(tmp.file("t.qawf"), bytes.substr(0, bytes.size() - 4));
    CHECK_THROWS_AS(read_feature_dump(tmp.file("t.qawf")), DataError);
}
