#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace canprint {

// Deterministic random source used everywhere the toolkit needs randomness.
// std::mt19937_64 output is fully specified by the standard; the uniform and
// normal mappings are written out here because the <random> distributions are
// implementation-defined and would break cross-toolchain reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, one spare cached per pair.
    double normal(double mean = 0.0, double stddev = 1.0);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed from a base seed and a tag. Used so that
// per-(ecu, channel) simulation streams do not depend on iteration schedule.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t n);

// FNV-1a over a byte string; also used for config hashing in artifacts.
std::uint64_t fnv1a64(std::string_view bytes);

} // namespace canprint
