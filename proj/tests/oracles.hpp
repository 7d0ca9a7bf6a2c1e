// Independent reference implementations used only by the test suites. Each
// one deliberately takes the most literal route (long division, double loops,
// per-element trigonometry) so it shares no code path with the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace oracle {

// CAN-15 checksum by explicit polynomial long division:
// divide message * x^15 by x^15+x^14+x^10+x^8+x^7+x^4+x^3+1 over GF(2).
inline std::uint16_t crc15_long_division(const std::vector<std::uint8_t>& message) {
    static const std::uint8_t divisor[16] = {1, 1, 0, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1};
    std::vector<std::uint8_t> work(message);
    work.insert(work.end(), 15, 0);
    for (std::size_t i = 0; i + 15 < work.size(); ++i) {
        if (work[i]) {
            for (std::size_t j = 0; j < 16; ++j)
                work[i + j] ^= divisor[j];
        }
    }
    std::uint16_t remainder = 0;
    for (std::size_t i = work.size() - 15; i < work.size(); ++i)
        remainder = static_cast<std::uint16_t>((remainder << 1) | work[i]);
    return remainder;
}

// Full linear convolution truncated to the signal length.
inline std::vector<double> naive_convolve(const std::vector<double>& h,
                                          const std::vector<double>& s) {
    std::vector<double> full(s.size() + h.size() - 1, 0.0);
    for (std::size_t n = 0; n < s.size(); ++n)
        for (std::size_t k = 0; k < h.size(); ++k)
            full[n + k] += s[n] * h[k];
    full.resize(s.size());
    return full;
}

// One-sided DFT magnitudes, trigonometry evaluated per element.
inline std::vector<double> naive_dft_magnitude(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> mags(n / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                         static_cast<double>(n);
            re += x[t] * std::cos(ang);
            im += x[t] * std::sin(ang);
        }
        mags[k] = std::sqrt(re * re + im * im);
    }
    return mags;
}

struct TimeStats {
    double max_v, min_v, mean_v, variance, skewness, kurtosis_excess;
};

inline TimeStats direct_time_stats(std::span<const double> y) {
    const double n = static_cast<double>(y.size());
    TimeStats s{};
    s.max_v = y[0];
    s.min_v = y[0];
    for (double v : y) {
        if (v > s.max_v) s.max_v = v;
        if (v < s.min_v) s.min_v = v;
    }
    double sum = 0.0;
    for (double v : y) sum += v;
    s.mean_v = sum / n;
    double ss = 0.0;
    for (double v : y) ss += (v - s.mean_v) * (v - s.mean_v);
    s.variance = ss / (n - 1.0);
    double sigma = std::sqrt(ss / n);
    double m3 = 0.0, m4 = 0.0;
    for (double v : y) {
        m3 += std::pow((v - s.mean_v) / sigma, 3.0);
        m4 += std::pow((v - s.mean_v) / sigma, 4.0);
    }
    s.skewness = m3 / n;
    s.kurtosis_excess = m4 / n - 3.0;
    return s;
}

struct SpectralStats {
    double centroid, std_dev, skewness, kurtosis_excess, irregularity_k;
};

inline SpectralStats direct_spectral_stats(std::span<const double> f, std::span<const double> m) {
    SpectralStats s{};
    double total = 0.0;
    for (double v : m) total += v;
    double cw = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) cw += f[i] * m[i];
    s.centroid = cw / total;
    double v2 = 0.0, v3 = 0.0, v4 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        v2 += std::pow(f[i] - s.centroid, 2.0) * m[i];
        v3 += std::pow(f[i] - s.centroid, 3.0) * m[i];
        v4 += std::pow(f[i] - s.centroid, 4.0) * m[i];
    }
    s.std_dev = std::sqrt(v2 / total);
    s.skewness = v3 / (std::pow(s.std_dev, 3.0) * total);
    s.kurtosis_excess = v4 / (std::pow(s.std_dev, 4.0) * total) - 3.0;
    double ik = 0.0;
    for (std::size_t i = 1; i + 1 < m.size(); ++i)
        ik += std::fabs(m[i] - (m[i - 1] + m[i] + m[i + 1]) / 3.0);
    s.irregularity_k = ik;
    return s;
}

} // namespace oracle
