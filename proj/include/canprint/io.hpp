#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "canprint/channelsim.hpp"
#include "canprint/features.hpp"
#include "canprint/featsel.hpp"
#include "canprint/mlp.hpp"

namespace canprint {

// Configuration / schema problem; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TaskTrainConfig {
    std::vector<int> hidden{20};
    int max_epochs = 2000;
    double grad_tol = 1e-7;
    double train_frac = 0.65;
};

// Pipeline manifest; "default" ecu/channel banks are expanded at load time.
struct Manifest {
    int schema = 1;
    std::uint64_t seed = 0;
    SimConfig sim;
    int feature_bins = 10;
    TaskTrainConfig channel_train{{50, 40, 40}, 2000, 1e-7, 0.65};
    TaskTrainConfig ecu_train{{20}, 2000, 1e-7, 0.65};
    std::map<std::string, std::string> paths;
};

Manifest default_manifest();
Manifest load_manifest(const std::string& path);
std::string manifest_to_json_string(const Manifest& m);

// 16-hex-digit FNV-1a over a canonical serialization; embedded in artifacts.
std::string config_hash(const Manifest& m);
std::string content_hash(const std::string& bytes);
std::string file_hash(const std::string& path);

// Provenance stamped into every artifact.
struct ArtifactMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
};

// Raw record CSV: comment line, header, then
// ecu_id,channel_id,sample_rate_hz,s0..s{W-1} per record.
void write_records_csv(const std::string& path, const std::vector<RawRecord>& records,
                       const ArtifactMeta& meta);
std::vector<RawRecord> read_records_csv(const std::string& path);

struct FeatureRow {
    std::string ecu_id;
    std::string channel_id;
    std::array<double, 11> values{};
};

void write_features_csv(const std::string& path, const std::vector<FeatureRow>& rows,
                        const ArtifactMeta& meta);
std::vector<FeatureRow> read_features_csv(const std::string& path);

void write_trace_csv(const std::string& path, const TrainTrace& trace, const ArtifactMeta& meta);

void save_model_json(const std::string& path, const MlpModel& model, const ArtifactMeta& meta);
MlpModel load_model_json(const std::string& path);

void write_ranking_json(const std::string& path, const RankingResult& ranking,
                        const std::vector<std::string>& feature_names, const ArtifactMeta& meta);

// Oscilloscope import: two-column time,volts CSV resampled by linear
// interpolation onto a uniform grid at sample_rate_hz.
Waveform read_scope_csv(const std::string& path, double sample_rate_hz);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace canprint
