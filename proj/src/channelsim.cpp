#include "canprint/channelsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "canprint/parallel.hpp"
#include "canprint/rng.hpp"

namespace canprint {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void validate(const EcuProfile& ecu) {
    bool shaped = ecu.rise_time_s != 0.0 || ecu.fall_time_s != 0.0;
    if (shaped && (ecu.rise_time_s <= 0.0 || ecu.fall_time_s <= 0.0))
        throw std::invalid_argument("ecu '" + ecu.ecu_id +
                                    "': rise_time_s and fall_time_s must both be positive (or both 0 to disable shaping)");
    if (!(ecu.overshoot_frac >= 0.0 && ecu.overshoot_frac < 1.0))
        throw std::invalid_argument("ecu '" + ecu.ecu_id + "': overshoot_frac must be in [0, 1)");
    if (ecu.ring_damping < 0.0 || ecu.jitter_std_s < 0.0 || ecu.noise_std_v < 0.0)
        throw std::invalid_argument("ecu '" + ecu.ecu_id + "': ring_damping, jitter_std_s, noise_std_v must be >= 0");
}

const char* to_string(CableFamily family) {
    switch (family) {
        case CableFamily::GXL: return "GXL";
        case CableFamily::TXL: return "TXL";
        case CableFamily::CANDATA: return "CANDATA";
    }
    return "GXL";
}

CableFamily cable_family_from_string(const std::string& name) {
    if (name == "GXL") return CableFamily::GXL;
    if (name == "TXL") return CableFamily::TXL;
    if (name == "CANDATA") return CableFamily::CANDATA;
    throw std::invalid_argument("unknown cable family '" + name + "' (expected GXL, TXL or CANDATA)");
}

void validate(const ChannelProfile& ch) {
    if (!ch.taps.empty()) {
        double sum = 0.0;
        for (double t : ch.taps) sum += t;
        if (sum < 0.9 || sum > 1.1)
            throw std::invalid_argument("channel '" + ch.channel_id + "': taps sum " + std::to_string(sum) +
                                        " outside [0.9, 1.1]");
        return;
    }
    if (!(ch.cutoff_hz > 0.0))
        throw std::invalid_argument("channel '" + ch.channel_id + "': cutoff_hz must be positive when taps are absent");
    if (!(ch.q_factor > 0.0))
        throw std::invalid_argument("channel '" + ch.channel_id + "': q_factor must be positive");
    if (ch.dc_gain < 0.9 || ch.dc_gain > 1.1)
        throw std::invalid_argument("channel '" + ch.channel_id + "': dc_gain outside [0.9, 1.1]");
}

Waveform shape_transmit(const Waveform& ideal, const EcuProfile& ecu, std::uint64_t seed) {
    validate(ecu);
    if (ideal.samples.empty())
        throw std::invalid_argument("shape_transmit: empty input waveform");
    if (!(ideal.sample_rate_hz > 0.0))
        throw std::invalid_argument("shape_transmit: sample_rate_hz must be positive");

    const double dt = 1.0 / ideal.sample_rate_hz;
    const bool shaped = ecu.rise_time_s != 0.0 || ecu.fall_time_s != 0.0;
    if (shaped && (ecu.rise_time_s < 2.0 * dt || ecu.fall_time_s < 2.0 * dt))
        throw std::invalid_argument("shape_transmit: rise/fall time below two sample periods is unresolvable");

    const std::size_t n = ideal.samples.size();
    const double tau_rise = ecu.rise_time_s / 2.2;  // 10-90% convention
    const double tau_fall = ecu.fall_time_s / 2.2;
    const double omega = 2.0 * kPi * ecu.ring_freq_hz;

    struct Edge {
        double pos;  // in samples, possibly fractional after jitter
        double dv;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < n; ++i) {
        double dv = ideal.samples[i] - ideal.samples[i - 1];
        if (dv != 0.0) edges.push_back({static_cast<double>(i), dv});
    }

    Rng rng(seed);
    // Draw order is fixed: one jitter per edge, then one noise value per sample.
    if (ecu.jitter_std_s > 0.0) {
        for (Edge& e : edges) {
            double j = rng.normal(0.0, ecu.jitter_std_s);
            j = std::clamp(j, -3.0 * ecu.jitter_std_s, 3.0 * ecu.jitter_std_s);
            e.pos += j / dt;
        }
    }

    Waveform out;
    out.sample_rate_hz = ideal.sample_rate_hz;
    out.ecu_id = ecu.ecu_id;
    out.channel_id = ideal.channel_id;
    out.samples.assign(n, ideal.samples.front() + ecu.level_offset_v);

    // Each edge contributes dv * g(t) with g -> 1; the settled part is applied
    // through a running sum, the transient part sample by sample until it
    // decays below 1e-12 of the swing.
    std::vector<double> settled(n + 1, 0.0);
    for (const Edge& e : edges) {
        double first = std::ceil(e.pos);
        std::size_t n0 = first < 0.0 ? 0 : static_cast<std::size_t>(first);
        if (n0 >= n) continue;
        if (!shaped && ecu.overshoot_frac == 0.0) {
            settled[n0] += e.dv;
            continue;
        }
        double tau = e.dv > 0.0 ? tau_rise : tau_fall;
        std::size_t m = n0;
        for (; m < n; ++m) {
            double t = (static_cast<double>(m) - e.pos) * dt;
            double expo = shaped ? std::exp(-t / tau) : 0.0;
            double ring = ecu.overshoot_frac != 0.0
                              ? ecu.overshoot_frac * std::sin(omega * t) * std::exp(-ecu.ring_damping * t)
                              : 0.0;
            double residual = expo + std::abs(ecu.overshoot_frac) * std::exp(-ecu.ring_damping * t);
            if (residual < 1e-12) break;
            out.samples[m] += e.dv * (1.0 - expo + ring);
        }
        settled[m] += e.dv;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += settled[i];
        out.samples[i] += acc;
    }

    if (ecu.noise_std_v > 0.0) {
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] += rng.normal(0.0, ecu.noise_std_v);
    }
    return out;
}

std::vector<double> convolve(const std::vector<double>& taps, const std::vector<double>& s) {
    if (taps.empty())
        throw std::invalid_argument("convolve: empty tap list");
    std::vector<double> out(s.size(), 0.0);
    const std::size_t k_max = taps.size();
    for (std::size_t n = 0; n < s.size(); ++n) {
        double acc = 0.0;
        std::size_t kk = std::min(k_max - 1, n);
        for (std::size_t k = 0; k <= kk; ++k)
            acc += taps[k] * s[n - k];
        out[n] = acc;
    }
    return out;
}

Waveform convolve(const std::vector<double>& taps, const Waveform& s) {
    Waveform out = s;
    out.samples = convolve(taps, s.samples);
    return out;
}

std::vector<double> derive_taps(double cutoff_hz, double q_factor, double dc_gain,
                                double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("derive_taps: sample_rate_hz must be positive");
    if (cutoff_hz >= sample_rate_hz / 2.0)
        throw std::invalid_argument("derive_taps: cutoff_hz must be below the Nyquist rate");
    if (!(cutoff_hz > 0.0) || !(q_factor > 0.0))
        throw std::invalid_argument("derive_taps: cutoff_hz and q_factor must be positive");

    // Bilinear-transform biquad low-pass.
    double k = std::tan(kPi * cutoff_hz / sample_rate_hz);
    double norm = 1.0 / (1.0 + k / q_factor + k * k);
    double b0 = k * k * norm;
    double b1 = 2.0 * b0;
    double b2 = b0;
    double a1 = 2.0 * (k * k - 1.0) * norm;
    double a2 = (1.0 - k / q_factor + k * k) * norm;

    constexpr std::size_t kMaxTaps = 8192;
    std::vector<double> h;
    h.reserve(256);
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < kMaxTaps; ++i) {
        double x = i == 0 ? 1.0 : 0.0;
        double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1; x1 = x;
        y2 = y1; y1 = y;
        h.push_back(y);
        peak = std::max(peak, std::abs(y));
        if (i > 8 && std::abs(y) < 1e-9 * peak && std::abs(y2) < 1e-9 * peak) break;
    }
    std::size_t last = h.size();
    while (last > 1 && std::abs(h[last - 1]) < 1e-6 * peak) --last;
    h.resize(last);

    double sum = 0.0;
    for (double v : h) sum += v;
    if (sum == 0.0)
        throw std::runtime_error("derive_taps: degenerate impulse response");
    double scale = dc_gain / sum;
    for (double& v : h) v *= scale;
    return h;
}

std::vector<double> channel_taps(const ChannelProfile& ch, double sample_rate_hz) {
    validate(ch);
    if (!ch.taps.empty()) return ch.taps;
    return derive_taps(ch.cutoff_hz, ch.q_factor, ch.dc_gain, sample_rate_hz);
}

Waveform apply_channel(const Waveform& s, const ChannelProfile& ch) {
    if (s.samples.empty())
        throw std::invalid_argument("apply_channel: empty input waveform");
    Waveform out = convolve(channel_taps(ch, s.sample_rate_hz), s);
    out.channel_id = ch.channel_id;
    return out;
}

std::vector<RawRecord> segment_into_records(const Waveform& received, int window_len,
                                            double threshold, std::size_t max_records) {
    if (window_len < 1)
        throw std::invalid_argument("segment_into_records: window_len must be >= 1");
    const auto& y = received.samples;
    std::size_t start = y.size();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] >= threshold) {
            start = i;
            break;
        }
    }
    const std::size_t w = static_cast<std::size_t>(window_len);
    std::vector<RawRecord> records;
    for (std::size_t p = start; p + w <= y.size() && records.size() < max_records; p += w) {
        RawRecord rec;
        rec.ecu_id = received.ecu_id;
        rec.channel_id = received.channel_id;
        rec.sample_rate_hz = received.sample_rate_hz;
        rec.samples.assign(y.begin() + static_cast<std::ptrdiff_t>(p),
                           y.begin() + static_cast<std::ptrdiff_t>(p + w));
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RawRecord> generate_dataset(const SimConfig& cfg) {
    if (cfg.ecus.empty()) throw std::invalid_argument("generate_dataset: ecus list is empty");
    if (cfg.channels.empty()) throw std::invalid_argument("generate_dataset: channels list is empty");
    if (cfg.records_per_class < 1) throw std::invalid_argument("generate_dataset: records_per_class must be >= 1");
    if (cfg.window_len < 1) throw std::invalid_argument("generate_dataset: window_len must be >= 1");
    if (cfg.idle_bits < 1) throw std::invalid_argument("generate_dataset: idle_bits must be >= 1");
    for (const auto& e : cfg.ecus) validate(e);
    for (const auto& c : cfg.channels) validate(c);

    BitSequence frame_bits = encode_frame(cfg.frame);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(cfg.idle_bits), 1);
    bits.insert(bits.end(), frame_bits.bits.begin(), frame_bits.bits.end());
    Waveform ideal = render_waveform(bits, cfg.signaling);

    const double threshold = cfg.signaling.v_rec_diff +
                             0.5 * (cfg.signaling.v_dom_diff - cfg.signaling.v_rec_diff);

    struct Setting {
        const EcuProfile* ecu;
        const ChannelProfile* ch;
    };
    std::vector<Setting> settings;
    for (const auto& e : cfg.ecus)
        for (const auto& c : cfg.channels)
            settings.push_back({&e, &c});

    std::vector<std::vector<RawRecord>> per_setting(settings.size());
    parallel_for(settings.size(), [&](std::size_t si) {
        const EcuProfile& ecu = *settings[si].ecu;
        const ChannelProfile& ch = *settings[si].ch;
        std::uint64_t sub = mix_seed(mix_seed(cfg.rng_seed, ecu.ecu_id), ch.channel_id);
        std::vector<double> taps = channel_taps(ch, cfg.signaling.sample_rate_hz);

        std::vector<RawRecord>& records = per_setting[si];
        records.reserve(static_cast<std::size_t>(cfg.records_per_class));
        std::uint64_t rep = 0;
        while (records.size() < static_cast<std::size_t>(cfg.records_per_class)) {
            Waveform sent = shape_transmit(ideal, ecu, mix_seed(sub, rep++));
            Waveform received = convolve(taps, sent);
            received.channel_id = ch.channel_id;
            std::size_t want = static_cast<std::size_t>(cfg.records_per_class) - records.size();
            std::vector<RawRecord> chunk = segment_into_records(received, cfg.window_len, threshold, want);
            if (chunk.empty())
                throw std::runtime_error(
                    "generate_dataset: no dominant edge found in received waveform for channel '" +
                    ch.channel_id + "'");
            for (auto& r : chunk) records.push_back(std::move(r));
        }
    });

    std::vector<RawRecord> all;
    all.reserve(settings.size() * static_cast<std::size_t>(cfg.records_per_class));
    for (auto& v : per_setting)
        for (auto& r : v) all.push_back(std::move(r));
    return all;
}

std::vector<EcuProfile> default_ecu_bank() {
    std::vector<EcuProfile> bank(4);
    bank[0] = {"ECU1", 300e-9, 320e-9, 0.06, 2.2e6, 6.0e6, -0.030, 3e-9, 0.010};
    bank[1] = {"ECU2", 360e-9, 340e-9, 0.10, 1.8e6, 4.5e6, -0.010, 4e-9, 0.012};
    bank[2] = {"ECU3", 420e-9, 380e-9, 0.14, 1.5e6, 3.5e6, 0.010, 5e-9, 0.014};
    bank[3] = {"ECU4", 480e-9, 430e-9, 0.08, 2.6e6, 5.0e6, 0.030, 6e-9, 0.016};
    return bank;
}

std::vector<ChannelProfile> default_channel_bank() {
    // Length -> base cutoff (longer cable, lower bandwidth); family scales the
    // cutoff and sets damping and per-meter attenuation.
    const double lengths[6] = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
    const double base_cutoff[6] = {4.2e6, 3.0e6, 2.1e6, 1.5e6, 1.05e6, 0.74e6};
    struct FamilySpec {
        CableFamily family;
        const char* name;
        double cutoff_scale;
        double q_base;
        double gain_slope_per_m;
    };
    const FamilySpec fams[3] = {
        {CableFamily::GXL, "GXL", 1.00, 0.52, 0.0085},
        {CableFamily::TXL, "TXL", 0.88, 0.72, 0.0065},
        {CableFamily::CANDATA, "CANDATA", 1.12, 0.62, 0.0050},
    };
    std::vector<ChannelProfile> bank;
    bank.reserve(18);
    for (const auto& f : fams) {
        for (int i = 0; i < 6; ++i) {
            ChannelProfile ch;
            double len = lengths[i];
            char label[32];
            std::snprintf(label, sizeof(label), "%s-%gm", f.name, len);
            ch.channel_id = label;
            ch.family = f.family;
            ch.length_m = len;
            ch.cutoff_hz = base_cutoff[i] * f.cutoff_scale;
            ch.q_factor = f.q_base + 0.025 * len;
            ch.dc_gain = 1.0 - f.gain_slope_per_m * len;
            bank.push_back(std::move(ch));
        }
    }
    return bank;
}

} // namespace canprint
