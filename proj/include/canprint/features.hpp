#pragma once

#include <array>
#include <span>
#include <vector>

#include "canprint/waveform.hpp"

namespace canprint {

// One-sided magnitude spectrum: bin k sits at k*fs/N, DC through Nyquist.
struct Spectrum {
    std::vector<double> y_f;  // bin frequencies, Hz
    std::vector<double> y_m;  // nonnegative magnitudes
};

struct TimeFeatures {
    double max_v = 0.0;
    double min_v = 0.0;
    double mean_v = 0.0;
    double variance_v2 = 0.0;  // unbiased (N-1) sample variance
    double skewness = 0.0;     // population-sigma standardized third moment
    double excess_kurtosis = 0.0;
    bool degenerate = false;   // zero-variance window; skew/kurt forced to 0
};

struct SpectralFeatures {
    double centroid_hz = 0.0;
    double std_hz = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;      // excess
    double irregularity_k = 0.0;
    bool degenerate = false;    // single active bin; skew/kurt forced to 0
};

// The 11 scalar attributes, in the fixed column order used by every artifact.
struct FeatureVector {
    double max_v = 0.0;
    double min_v = 0.0;
    double mean_v = 0.0;
    double variance_v2 = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double spec_std_hz = 0.0;
    double spec_skewness = 0.0;
    double spec_kurtosis = 0.0;
    double spec_centroid_hz = 0.0;
    double irregularity_k = 0.0;
    bool degenerate = false;  // any moment above was reported by convention

    static const std::array<const char*, 11>& names();
    std::array<double, 11> values() const;
};

// Rectangular-window DFT magnitude; requires at least 8 samples.
Spectrum magnitude_spectrum(std::span<const double> samples, double sample_rate_hz);
Spectrum magnitude_spectrum(const Waveform& w);

// Requires at least 2 samples; never returns non-finite values.
TimeFeatures time_features(std::span<const double> samples);

// Magnitude-weighted spectral moments about the centroid plus irregularity-K.
// Throws on an all-zero spectrum.
SpectralFeatures spectral_features(const Spectrum& sp);

FeatureVector extract(std::span<const double> samples, double sample_rate_hz);
FeatureVector extract(const Waveform& window);

} // namespace canprint
