#include "canprint/canframe.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace canprint {

void validate(const CanFrame& frame) {
    if (frame.id >= (1u << 11))
        throw std::invalid_argument("frame.id does not fit in 11 bits: " + std::to_string(frame.id));
    if (frame.dlc > 8)
        throw std::invalid_argument("frame.dlc exceeds 8: " + std::to_string(frame.dlc));
    if (frame.data.size() != frame.dlc)
        throw std::invalid_argument("frame.data length " + std::to_string(frame.data.size()) +
                                    " does not match dlc " + std::to_string(frame.dlc));
}

void validate(const SignalingConfig& cfg) {
    if (cfg.bitrate_bps <= 0.0)
        throw std::invalid_argument("signaling.bitrate_bps must be positive");
    if (cfg.sample_rate_hz < 20.0 * cfg.bitrate_bps)
        throw std::invalid_argument("signaling.sample_rate_hz must be at least 20x bitrate_bps");
    if (!(cfg.v_dom_diff > cfg.v_rec_diff))
        throw std::invalid_argument("signaling.v_dom_diff must exceed v_rec_diff");
}

int samples_per_bit(const SignalingConfig& cfg) {
    return static_cast<int>(std::llround(cfg.sample_rate_hz / cfg.bitrate_bps));
}

std::uint16_t crc15(const std::vector<std::uint8_t>& bits) {
    std::uint16_t crc = 0;
    for (std::uint8_t bit : bits) {
        bool crcnxt = ((bit & 1u) != 0) != ((crc & 0x4000u) != 0);
        crc = static_cast<std::uint16_t>((crc << 1) & 0x7fffu);
        if (crcnxt) crc ^= 0x4599u;
    }
    return crc;
}

namespace {

void push_msb_first(std::vector<std::uint8_t>& out, std::uint32_t value, int nbits) {
    for (int i = nbits - 1; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
}

constexpr std::uint8_t kDominant = 0;
constexpr std::uint8_t kRecessive = 1;

} // namespace

std::vector<std::uint8_t> frame_payload_bits(const CanFrame& frame) {
    validate(frame);
    std::vector<std::uint8_t> bits;
    bits.reserve(19 + 8 * frame.dlc);
    bits.push_back(kDominant);                 // SOF
    push_msb_first(bits, frame.id, 11);        // identifier
    bits.push_back(frame.rtr ? kRecessive : kDominant);  // RTR
    bits.push_back(kDominant);                 // IDE (standard format)
    bits.push_back(kDominant);                 // r0
    push_msb_first(bits, frame.dlc, 4);        // DLC
    for (std::uint8_t byte : frame.data)
        push_msb_first(bits, byte, 8);
    return bits;
}

std::vector<std::uint8_t> unstuffed_bits(const CanFrame& frame) {
    std::vector<std::uint8_t> bits = frame_payload_bits(frame);
    push_msb_first(bits, crc15(bits), 15);     // CRC sequence
    bits.push_back(kRecessive);                // CRC delimiter
    bits.push_back(kRecessive);                // ACK slot (no responder modeled)
    bits.push_back(kRecessive);                // ACK delimiter
    for (int i = 0; i < 7; ++i)
        bits.push_back(kRecessive);            // EOF
    return bits;
}

BitSequence encode_frame(const CanFrame& frame) {
    std::vector<std::uint8_t> payload = frame_payload_bits(frame);
    std::size_t stuffable_raw = payload.size() + 15;  // SOF..CRC sequence
    std::vector<std::uint8_t> raw = unstuffed_bits(frame);

    BitSequence seq;
    seq.bits.reserve(raw.size() + raw.size() / 4);
    int run = 0;
    std::uint8_t run_bit = 2;  // out of band, no run yet
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i < stuffable_raw && run == 5) {
            std::uint8_t stuff = static_cast<std::uint8_t>(1u - run_bit);
            seq.stuff_positions.push_back(seq.bits.size());
            seq.bits.push_back(stuff);
            run_bit = stuff;
            run = 1;
        }
        std::uint8_t bit = raw[i];
        seq.bits.push_back(bit);
        if (bit == run_bit) {
            ++run;
        } else {
            run_bit = bit;
            run = 1;
        }
        if (i + 1 == stuffable_raw) {
            // A run ending exactly at the CRC boundary still gets its stuff bit.
            if (run == 5) {
                std::uint8_t stuff = static_cast<std::uint8_t>(1u - run_bit);
                seq.stuff_positions.push_back(seq.bits.size());
                seq.bits.push_back(stuff);
            }
            seq.stuffed_region_len = seq.bits.size();
            run = 0;
            run_bit = 2;
        }
    }
    return seq;
}

std::vector<std::uint8_t> destuff(const BitSequence& seq) {
    std::vector<std::uint8_t> raw;
    raw.reserve(seq.bits.size());
    int run = 0;
    std::uint8_t run_bit = 2;
    bool drop_next = false;
    for (std::size_t i = 0; i < seq.bits.size(); ++i) {
        std::uint8_t bit = seq.bits[i];
        if (i < seq.stuffed_region_len) {
            if (drop_next) {
                drop_next = false;
                run_bit = bit;
                run = 1;
                continue;
            }
            raw.push_back(bit);
            if (bit == run_bit) {
                ++run;
            } else {
                run_bit = bit;
                run = 1;
            }
            if (run == 5) drop_next = true;
        } else {
            raw.push_back(bit);
        }
    }
    return raw;
}

Waveform render_waveform(const std::vector<std::uint8_t>& bits, const SignalingConfig& cfg) {
    validate(cfg);
    int spb = samples_per_bit(cfg);
    Waveform w;
    w.sample_rate_hz = cfg.sample_rate_hz;
    w.samples.resize(bits.size() * static_cast<std::size_t>(spb));
    std::size_t n = 0;
    for (std::uint8_t bit : bits) {
        double level = (bit & 1u) ? cfg.v_rec_diff : cfg.v_dom_diff;
        for (int s = 0; s < spb; ++s)
            w.samples[n++] = level;
    }
    return w;
}

Waveform render_waveform(const BitSequence& seq, const SignalingConfig& cfg) {
    return render_waveform(seq.bits, cfg);
}

} // namespace canprint
