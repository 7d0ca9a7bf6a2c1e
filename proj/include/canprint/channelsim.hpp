#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canprint/canframe.hpp"
#include "canprint/waveform.hpp"

namespace canprint {

// Transmitter-specific distortion parameters. rise/fall of 0 together disable
// edge shaping entirely (ideal steps); positive values must resolve to at
// least two sample periods.
struct EcuProfile {
    std::string ecu_id;
    double rise_time_s = 300e-9;   // 10-90% rise time
    double fall_time_s = 300e-9;
    double overshoot_frac = 0.0;   // fraction of the edge swing
    double ring_freq_hz = 2.0e6;
    double ring_damping = 5.0e6;   // 1/s decay of the ring
    double level_offset_v = 0.0;   // shifts both plateaus
    double jitter_std_s = 0.0;     // per-edge Gaussian, clamped to +-3 sigma
    double noise_std_v = 0.0;      // per-sample additive Gaussian
};

void validate(const EcuProfile& ecu);

enum class CableFamily { GXL, TXL, CANDATA };

const char* to_string(CableFamily family);
CableFamily cable_family_from_string(const std::string& name);

// Cable model: either explicit FIR taps, or a second-order low-pass
// (cutoff_hz, q_factor) discretized by the bilinear transform, scaled to an
// exact DC gain of dc_gain. taps take precedence when non-empty.
struct ChannelProfile {
    std::string channel_id;
    CableFamily family = CableFamily::GXL;
    double length_m = 1.0;
    std::vector<double> taps;
    double cutoff_hz = 0.0;
    double q_factor = 0.0;
    double dc_gain = 1.0;
};

void validate(const ChannelProfile& ch);

struct SimConfig {
    std::vector<EcuProfile> ecus;
    std::vector<ChannelProfile> channels;
    CanFrame frame;
    SignalingConfig signaling;
    int records_per_class = 3600;
    int window_len = 40;
    int idle_bits = 10;  // recessive bus idle rendered before SOF
    std::uint64_t rng_seed = 0;
};

struct RawRecord {
    std::string ecu_id;
    std::string channel_id;
    double sample_rate_hz = 0.0;
    std::vector<double> samples;
};

// Applies the transmitter model to an ideal rectangular waveform: exponential
// edges (time constant rise/2.2), damped-sine overshoot, plateau offset, edge
// jitter and additive noise. Pure function of (inputs, seed).
Waveform shape_transmit(const Waveform& ideal, const EcuProfile& ecu, std::uint64_t seed);

// Causal same-length convolution: out[n] = sum_k h[k] * s[n-k].
std::vector<double> convolve(const std::vector<double>& taps, const std::vector<double>& s);
Waveform convolve(const std::vector<double>& taps, const Waveform& s);

// Impulse response of the bilinear-discretized second-order low-pass,
// truncated where |h| falls below 1e-6 of its peak, normalized to dc_gain.
std::vector<double> derive_taps(double cutoff_hz, double q_factor, double dc_gain,
                                double sample_rate_hz);

// Effective taps for a profile at the given sample rate.
std::vector<double> channel_taps(const ChannelProfile& ch, double sample_rate_hz);

Waveform apply_channel(const Waveform& s, const ChannelProfile& ch);

// Consecutive window_len-sample records starting at the first sample at or
// above threshold (the first dominant edge). Labels come from the waveform's
// provenance fields. Stops after max_records or when the waveform runs out.
std::vector<RawRecord> segment_into_records(const Waveform& received, int window_len,
                                            double threshold, std::size_t max_records);

// Full synthesis: encode -> render -> shape -> channel, repeated with fresh
// jitter/noise, then segmented into window_len-sample records starting at the
// first dominant edge of the received waveform. Deterministic in rng_seed and
// independent of evaluation order across (ecu, channel) settings.
std::vector<RawRecord> generate_dataset(const SimConfig& cfg);

// Default profile banks. Channels: 3 cable families x 6 lengths, mapped to
// (cutoff, Q, dc_gain) by a documented table; longer cable -> lower cutoff,
// higher Q, more attenuation. ECUs: four transmitters with distinct edge,
// ring, offset and noise characteristics.
std::vector<EcuProfile> default_ecu_bank();
std::vector<ChannelProfile> default_channel_bank();

} // namespace canprint
