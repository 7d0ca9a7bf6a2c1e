#include "canprint/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace canprint {

const std::array<const char*, 11>& FeatureVector::names() {
    static const std::array<const char*, 11> kNames = {
        "max_v",        "min_v",         "mean_v",        "variance_v2",
        "skewness",     "excess_kurtosis", "spec_std_hz", "spec_skewness",
        "spec_kurtosis", "spec_centroid_hz", "irregularity_k"};
    return kNames;
}

std::array<double, 11> FeatureVector::values() const {
    return {max_v,        min_v,         mean_v,        variance_v2,
            skewness,     excess_kurtosis, spec_std_hz, spec_skewness,
            spec_kurtosis, spec_centroid_hz, irregularity_k};
}

Spectrum magnitude_spectrum(std::span<const double> samples, double sample_rate_hz) {
    const std::size_t n = samples.size();
    if (n < 8)
        throw std::invalid_argument("magnitude_spectrum: window must hold at least 8 samples");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("magnitude_spectrum: sample_rate_hz must be positive");

    const std::size_t bins = n / 2 + 1;
    Spectrum sp;
    sp.y_f.resize(bins);
    sp.y_m.resize(bins);

    // Twiddle table: index (k*t) mod n walks the unit circle.
    std::vector<double> cos_tab(n), sin_tab(n);
    const double step = 2.0 * 3.14159265358979323846 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        cos_tab[i] = std::cos(step * static_cast<double>(i));
        sin_tab[i] = std::sin(step * static_cast<double>(i));
    }

    for (std::size_t k = 0; k < bins; ++k) {
        double re = 0.0, im = 0.0;
        std::size_t idx = 0;
        for (std::size_t t = 0; t < n; ++t) {
            re += samples[t] * cos_tab[idx];
            im -= samples[t] * sin_tab[idx];
            idx += k;
            if (idx >= n) idx -= n;
        }
        sp.y_m[k] = std::hypot(re, im);
        sp.y_f[k] = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n);
    }
    return sp;
}

Spectrum magnitude_spectrum(const Waveform& w) {
    return magnitude_spectrum(w.samples, w.sample_rate_hz);
}

TimeFeatures time_features(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2)
        throw std::invalid_argument("time_features: window must hold at least 2 samples");
    for (double v : samples)
        if (!std::isfinite(v))
            throw std::invalid_argument("time_features: non-finite sample");

    TimeFeatures f;
    f.max_v = samples[0];
    f.min_v = samples[0];
    double sum = 0.0;
    for (double v : samples) {
        f.max_v = std::max(f.max_v, v);
        f.min_v = std::min(f.min_v, v);
        sum += v;
    }
    f.mean_v = sum / static_cast<double>(n);

    double ss = 0.0;
    for (double v : samples) {
        double d = v - f.mean_v;
        ss += d * d;
    }
    f.variance_v2 = ss / static_cast<double>(n - 1);

    double sigma_pop = std::sqrt(ss / static_cast<double>(n));
    if (sigma_pop == 0.0) {
        f.skewness = 0.0;
        f.excess_kurtosis = 0.0;
        f.degenerate = true;
        return f;
    }
    double s3 = 0.0, s4 = 0.0;
    for (double v : samples) {
        double z = (v - f.mean_v) / sigma_pop;
        double z3 = z * z * z;
        s3 += z3;
        s4 += z3 * z;
    }
    f.skewness = s3 / static_cast<double>(n);
    f.excess_kurtosis = s4 / static_cast<double>(n) - 3.0;
    return f;
}

SpectralFeatures spectral_features(const Spectrum& sp) {
    const std::size_t n = sp.y_m.size();
    if (n == 0 || sp.y_f.size() != n)
        throw std::invalid_argument("spectral_features: frequency and magnitude vectors must match");

    double total = 0.0;
    for (double m : sp.y_m) {
        if (!(m >= 0.0))
            throw std::invalid_argument("spectral_features: magnitudes must be nonnegative");
        total += m;
    }
    if (total <= 0.0)
        throw std::runtime_error("spectral_features: all-zero spectrum");

    SpectralFeatures f;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += sp.y_f[i] * sp.y_m[i];
    f.centroid_hz = acc / total;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = sp.y_f[i] - f.centroid_hz;
        double w = sp.y_m[i];
        double d2 = d * d;
        m2 += d2 * w;
        m3 += d2 * d * w;
        m4 += d2 * d2 * w;
    }
    f.std_hz = std::sqrt(m2 / total);
    if (f.std_hz == 0.0) {
        f.skewness = 0.0;
        f.kurtosis = 0.0;
        f.degenerate = true;
    } else {
        double s2 = f.std_hz * f.std_hz;
        f.skewness = m3 / (s2 * f.std_hz * total);
        f.kurtosis = m4 / (s2 * s2 * total) - 3.0;
    }

    // Interior bins only, per the i = 2 .. N-1 summation limits.
    double ik = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        ik += std::abs(sp.y_m[i] - (sp.y_m[i - 1] + sp.y_m[i] + sp.y_m[i + 1]) / 3.0);
    f.irregularity_k = ik;
    return f;
}

FeatureVector extract(std::span<const double> samples, double sample_rate_hz) {
    TimeFeatures t = time_features(samples);
    SpectralFeatures s = spectral_features(magnitude_spectrum(samples, sample_rate_hz));

    FeatureVector v;
    v.max_v = t.max_v;
    v.min_v = t.min_v;
    v.mean_v = t.mean_v;
    v.variance_v2 = t.variance_v2;
    v.skewness = t.skewness;
    v.excess_kurtosis = t.excess_kurtosis;
    v.spec_std_hz = s.std_hz;
    v.spec_skewness = s.skewness;
    v.spec_kurtosis = s.kurtosis;
    v.spec_centroid_hz = s.centroid_hz;
    v.irregularity_k = s.irregularity_k;
    v.degenerate = t.degenerate || s.degenerate;
    return v;
}

FeatureVector extract(const Waveform& window) {
    return extract(window.samples, window.sample_rate_hz);
}

} // namespace canprint
