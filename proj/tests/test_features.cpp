#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "canprint/channelsim.hpp"
#include "canprint/features.hpp"
#include "canprint/rng.hpp"
#include "oracles.hpp"

using namespace canprint;

namespace {

std::vector<double> random_window(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> w(n);
    for (auto& v : w) v = dist(gen);
    return w;
}

bool rel_close(double a, double b, double tol) {
    double scale = std::max({std::abs(a), std::abs(b), 1e-30});
    return std::abs(a - b) / scale <= tol;
}

} // namespace

TEST_CASE("magnitude_spectrum of a constant window is a DC point mass") {
    std::vector<double> w(16, 3.25);
    Spectrum sp = magnitude_spectrum(w, 1000.0);
    REQUIRE(sp.y_m.size() == 9);
    CHECK(sp.y_m[0] == doctest::Approx(16.0 * 3.25).epsilon(1e-12));
    for (std::size_t k = 1; k < sp.y_m.size(); ++k)
        CHECK(std::abs(sp.y_m[k]) < 1e-9);
    CHECK(sp.y_f[0] == 0.0);
    CHECK(sp.y_f[1] == doctest::Approx(1000.0 / 16.0));
}

TEST_CASE("magnitude_spectrum of a pure cosine concentrates at its bin") {
    const std::size_t n = 64;
    std::vector<double> w(n);
    for (std::size_t t = 0; t < n; ++t)
        w[t] = std::cos(2.0 * M_PI * 4.0 * static_cast<double>(t) / static_cast<double>(n));
    Spectrum sp = magnitude_spectrum(w, 6400.0);
    CHECK(sp.y_m[4] == doctest::Approx(static_cast<double>(n) / 2.0).epsilon(1e-9));
    for (std::size_t k = 1; k < sp.y_m.size(); ++k) {
        if (k == 4) continue;
        CHECK(std::abs(sp.y_m[k]) < 1e-8);
    }
    CHECK(sp.y_f[4] == doctest::Approx(4.0 * 6400.0 / 64.0));
}

TEST_CASE("magnitude_spectrum rejects short windows") {
    std::vector<double> w(7, 1.0);
    CHECK_THROWS_AS(magnitude_spectrum(w, 100.0), std::invalid_argument);
}

TEST_CASE("Parseval identity holds against the naive DFT oracle") {
    std::mt19937_64 gen(123);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 8 + 2 * (gen() % 60);  // even windows, 8..126
        auto w = random_window(gen, n);
        double time_energy = 0.0;
        for (double v : w) time_energy += v * v;

        auto check_parseval = [&](const std::vector<double>& mags) {
            double freq_energy = mags[0] * mags[0];
            for (std::size_t k = 1; k + 1 < mags.size(); ++k)
                freq_energy += 2.0 * mags[k] * mags[k];
            freq_energy += mags.back() * mags.back();
            freq_energy /= static_cast<double>(n);
            CHECK(rel_close(time_energy, freq_energy, 1e-9));
        };
        check_parseval(magnitude_spectrum(w, 1.0e6).y_m);
        check_parseval(oracle::naive_dft_magnitude(w));
    }
}

TEST_CASE("time_features hand example and symmetry") {
    TimeFeatures f = time_features(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(f.max_v == 3.0);
    CHECK(f.min_v == 1.0);
    CHECK(f.mean_v == doctest::Approx(2.0));
    CHECK(f.variance_v2 == doctest::Approx(1.0));
    CHECK_FALSE(f.degenerate);

    TimeFeatures sym = time_features(std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(std::abs(sym.skewness) <= 1e-12);
}

TEST_CASE("time_features on many Gaussian samples approaches zero excess kurtosis") {
    Rng rng(20240202);
    std::vector<double> w(1000000);
    for (auto& v : w) v = rng.normal();
    TimeFeatures f = time_features(w);
    CHECK(std::abs(f.excess_kurtosis) < 0.02);
    CHECK(std::abs(f.skewness) < 0.02);
    CHECK(f.variance_v2 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("zero-variance window degenerates to flagged zeros, never NaN") {
    TimeFeatures f = time_features(std::vector<double>{2.0, 2.0, 2.0, 2.0});
    CHECK(f.degenerate);
    CHECK(f.skewness == 0.0);
    CHECK(f.excess_kurtosis == 0.0);
    CHECK(f.variance_v2 == 0.0);
    CHECK(std::isfinite(f.mean_v));
}

TEST_CASE("spectral_features point masses") {
    SUBCASE("single active bin") {
        Spectrum sp{{0.0, 100.0, 200.0, 300.0}, {0.0, 0.0, 5.0, 0.0}};
        SpectralFeatures f = spectral_features(sp);
        CHECK(f.centroid_hz == doctest::Approx(200.0));
        CHECK(f.std_hz == 0.0);
        CHECK(f.degenerate);
        CHECK(f.skewness == 0.0);
        CHECK(f.kurtosis == 0.0);
    }
    SUBCASE("two equal bins") {
        Spectrum sp{{0.0, 100.0, 200.0, 300.0}, {0.0, 2.0, 0.0, 2.0}};
        SpectralFeatures f = spectral_features(sp);
        CHECK(f.centroid_hz == doctest::Approx(200.0));
        CHECK(f.std_hz == doctest::Approx(100.0));
        CHECK(std::abs(f.skewness) < 1e-12);
        CHECK_FALSE(f.degenerate);
    }
}

TEST_CASE("flat spectrum has zero irregularity") {
    Spectrum sp;
    for (int i = 0; i < 12; ++i) {
        sp.y_f.push_back(100.0 * i);
        sp.y_m.push_back(3.0);
    }
    SpectralFeatures f = spectral_features(sp);
    CHECK(f.irregularity_k == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spectral_features matches the direct-summation oracle") {
    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> mag(0.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        Spectrum sp;
        for (int i = 0; i < 32; ++i) {
            sp.y_f.push_back(250.0 * i);
            sp.y_m.push_back(mag(gen));
        }
        SpectralFeatures got = spectral_features(sp);
        auto want = oracle::direct_spectral_stats(sp.y_f, sp.y_m);
        CHECK(rel_close(got.centroid_hz, want.centroid, 1e-9));
        CHECK(rel_close(got.std_hz, want.std_dev, 1e-9));
        CHECK(rel_close(got.skewness, want.skewness, 1e-9));
        CHECK(rel_close(got.kurtosis, want.kurtosis_excess, 1e-9));
        CHECK(rel_close(got.irregularity_k, want.irregularity_k, 1e-9));
    }
}

TEST_CASE("spectral_features rejects an all-zero spectrum") {
    Spectrum sp{{0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(spectral_features(sp), std::runtime_error);
}

TEST_CASE("extract on a constant window") {
    std::vector<double> w(40, 1.5);
    FeatureVector v = extract(w, 10e6);
    CHECK(v.max_v == 1.5);
    CHECK(v.min_v == 1.5);
    CHECK(v.mean_v == doctest::Approx(1.5));
    CHECK(v.variance_v2 == 0.0);
    CHECK(v.degenerate);
    CHECK(v.spec_centroid_hz == doctest::Approx(0.0));  // DC point mass
}

TEST_CASE("extract is pure") {
    std::mt19937_64 gen(55);
    auto w = random_window(gen, 40);
    FeatureVector a = extract(w, 10e6);
    FeatureVector b = extract(w, 10e6);
    CHECK(a.values() == b.values());
}

TEST_CASE("all 11 features match direct-summation oracles on random windows") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 8 + 2 * (gen() % 28);  // 8..62 samples
        auto w = random_window(gen, n);
        double fs = 10e6;
        FeatureVector got = extract(w, fs);

        auto ts = oracle::direct_time_stats(w);
        auto mags = oracle::naive_dft_magnitude(w);
        std::vector<double> freqs(mags.size());
        for (std::size_t k = 0; k < mags.size(); ++k)
            freqs[k] = static_cast<double>(k) * fs / static_cast<double>(n);
        auto ss = oracle::direct_spectral_stats(freqs, mags);

        CHECK(rel_close(got.max_v, ts.max_v, 1e-9));
        CHECK(rel_close(got.min_v, ts.min_v, 1e-9));
        CHECK(rel_close(got.mean_v, ts.mean_v, 1e-9));
        CHECK(rel_close(got.variance_v2, ts.variance, 1e-9));
        CHECK(rel_close(got.skewness, ts.skewness, 1e-9));
        CHECK(rel_close(got.excess_kurtosis, ts.kurtosis_excess, 1e-9));
        CHECK(rel_close(got.spec_centroid_hz, ss.centroid, 1e-9));
        CHECK(rel_close(got.spec_std_hz, ss.std_dev, 1e-9));
        CHECK(rel_close(got.spec_skewness, ss.skewness, 1e-9));
        CHECK(rel_close(got.spec_kurtosis, ss.kurtosis_excess, 1e-9));
        CHECK(rel_close(got.irregularity_k, ss.irregularity_k, 1e-9));
    }
}

TEST_CASE("shift property: constant offsets move only location features") {
    std::mt19937_64 gen(88);
    auto w = random_window(gen, 40);
    FeatureVector base = extract(w, 10e6);
    double c = 2.75;
    auto shifted = w;
    for (auto& v : shifted) v += c;
    FeatureVector moved = extract(shifted, 10e6);
    CHECK(rel_close(moved.mean_v, base.mean_v + c, 1e-9));
    CHECK(rel_close(moved.max_v, base.max_v + c, 1e-9));
    CHECK(rel_close(moved.min_v, base.min_v + c, 1e-9));
    CHECK(rel_close(moved.variance_v2, base.variance_v2, 1e-9));
    CHECK(std::abs(moved.skewness - base.skewness) <= 1e-9);
    CHECK(std::abs(moved.excess_kurtosis - base.excess_kurtosis) <= 1e-9);
}

TEST_CASE("scale property: gains scale amplitudes, not shapes") {
    std::mt19937_64 gen(89);
    auto w = random_window(gen, 40);
    FeatureVector base = extract(w, 10e6);
    double a = 3.5;
    auto scaled = w;
    for (auto& v : scaled) v *= a;
    FeatureVector s = extract(scaled, 10e6);
    CHECK(rel_close(s.mean_v, a * base.mean_v, 1e-9));
    CHECK(rel_close(s.max_v, a * base.max_v, 1e-9));
    CHECK(rel_close(s.min_v, a * base.min_v, 1e-9));
    CHECK(rel_close(s.variance_v2, a * a * base.variance_v2, 1e-9));
    CHECK(std::abs(s.skewness - base.skewness) <= 1e-9);
    CHECK(std::abs(s.excess_kurtosis - base.excess_kurtosis) <= 1e-9);
    CHECK(rel_close(s.spec_centroid_hz, base.spec_centroid_hz, 1e-9));
    CHECK(rel_close(s.spec_std_hz, base.spec_std_hz, 1e-9));
    CHECK(std::abs(s.spec_skewness - base.spec_skewness) <= 1e-9);
    CHECK(std::abs(s.spec_kurtosis - base.spec_kurtosis) <= 1e-9);
    CHECK(rel_close(s.irregularity_k, a * base.irregularity_k, 1e-9));
}

// Frozen reference for one synthetic record; values computed once with the
// direct-summation oracles above (see the assertions that recompute them).
TEST_CASE("golden feature vector on a fixed synthetic record") {
    SimConfig cfg;
    cfg.frame.id = 0x555;
    cfg.frame.dlc = 8;
    cfg.frame.data.assign(8, 0x55);
    cfg.ecus = {default_ecu_bank()[2]};
    cfg.channels = {default_channel_bank()[8]};
    cfg.records_per_class = 5;
    cfg.rng_seed = 20250809;
    auto records = generate_dataset(cfg);
    REQUIRE(records.size() == 5);
    const auto& rec = records[3];

    FeatureVector got = extract(rec.samples, rec.sample_rate_hz);

    auto ts = oracle::direct_time_stats(rec.samples);
    auto mags = oracle::naive_dft_magnitude(rec.samples);
    std::vector<double> freqs(mags.size());
    for (std::size_t k = 0; k < mags.size(); ++k)
        freqs[k] = static_cast<double>(k) * rec.sample_rate_hz / static_cast<double>(rec.samples.size());
    auto ss = oracle::direct_spectral_stats(freqs, mags);
    CHECK(rel_close(got.max_v, ts.max_v, 1e-9));
    CHECK(rel_close(got.variance_v2, ts.variance, 1e-9));
    CHECK(rel_close(got.spec_centroid_hz, ss.centroid, 1e-9));
    CHECK(rel_close(got.irregularity_k, ss.irregularity_k, 1e-9));

    const double golden[11] = {
        1.9906515749162033,      // max_v
        0.0036007522808298325,   // min_v
        0.98968363215668043,     // mean_v
        0.8232511661095876,      // variance_v2
        0.0059396417283203388,   // skewness
        -1.8817356297742029,     // excess_kurtosis
        513987.89907474292,      // spec_std_hz
        2.9577399993206401,      // spec_skewness
        10.897111456590009,      // spec_kurtosis
        289297.17879107775,      // spec_centroid_hz
        26.793078638222777,      // irregularity_k
    };
    auto values = got.values();
    for (std::size_t i = 0; i < 11; ++i)
        CHECK(rel_close(values[i], golden[i], 1e-9));
}
