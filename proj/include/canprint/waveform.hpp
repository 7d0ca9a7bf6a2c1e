#pragma once

#include <string>
#include <vector>

namespace canprint {

// Uniformly sampled differential bus voltage. ecu_id / channel_id are
// provenance labels carried through the simulation chain; empty when unset.
struct Waveform {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    std::string ecu_id;
    std::string channel_id;
};

} // namespace canprint
