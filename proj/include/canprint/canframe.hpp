#pragma once

#include <cstdint>
#include <vector>

#include "canprint/waveform.hpp"

namespace canprint {

// Standard-format (11-bit identifier) CAN 2.0A data frame.
struct CanFrame {
    std::uint16_t id = 0;            // must fit in 11 bits
    std::uint8_t dlc = 0;            // 0..8
    std::vector<std::uint8_t> data;  // size == dlc
    bool rtr = false;
};

// Throws std::invalid_argument when a frame violates its invariants.
void validate(const CanFrame& frame);

// Logical bit levels on the wire: 0 = dominant, 1 = recessive.
struct BitSequence {
    std::vector<std::uint8_t> bits;
    std::vector<std::size_t> stuff_positions;  // indices of inserted stuff bits
    std::size_t stuffed_region_len = 0;        // bits [0, len) are stuff-coded (SOF..CRC)
};

struct SignalingConfig {
    double bitrate_bps = 500000.0;
    double sample_rate_hz = 10.0e6;
    double v_dom_diff = 2.0;  // dominant differential level
    double v_rec_diff = 0.0;  // recessive differential level
};

void validate(const SignalingConfig& cfg);
int samples_per_bit(const SignalingConfig& cfg);

// CAN-15 checksum of an unstuffed bit prefix (SOF through end of data field).
// Shift-register form of the x^15+x^14+x^10+x^8+x^7+x^4+x^3+1 division.
std::uint16_t crc15(const std::vector<std::uint8_t>& bits);

// Unstuffed frame bits from SOF through the end of the data field (CRC input).
std::vector<std::uint8_t> frame_payload_bits(const CanFrame& frame);

// Full unstuffed frame: SOF, arbitration, control, data, CRC, CRC delimiter,
// ACK slot + delimiter, 7-bit EOF. ACK slot rendered recessive (no responder).
std::vector<std::uint8_t> unstuffed_bits(const CanFrame& frame);

// Stuffed transmit sequence. Stuffing covers SOF through the CRC sequence:
// after five consecutive identical output bits the complement is inserted.
BitSequence encode_frame(const CanFrame& frame);

// Removes stuff bits by re-scanning the stuffed region; the recorded
// stuff_positions are not consulted, so this doubles as a check on them.
std::vector<std::uint8_t> destuff(const BitSequence& seq);

// Ideal rectangular rendering; each bit occupies samples_per_bit(cfg) samples.
Waveform render_waveform(const std::vector<std::uint8_t>& bits, const SignalingConfig& cfg);
Waveform render_waveform(const BitSequence& seq, const SignalingConfig& cfg);

} // namespace canprint
