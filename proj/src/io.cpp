#include "canprint/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "canprint/rng.hpp"
#include "json.hpp"

namespace canprint {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

std::string content_hash(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string file_hash(const std::string& path) {
    return content_hash(read_text_file(path));
}

namespace {

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_sample(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

const json& require(const json& j, const char* key, const std::string& context) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError("manifest: missing field '" + context + key + "'");
    return *it;
}

double require_number(const json& j, const char* key, const std::string& context) {
    const json& v = require(j, key, context);
    if (!v.is_number())
        throw ConfigError("manifest: field '" + context + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number())
        throw ConfigError(std::string("manifest: field '") + key + "' must be a number");
    return it->get<double>();
}

std::uint16_t parse_frame_id(const json& v) {
    if (v.is_number_unsigned() || v.is_number_integer())
        return static_cast<std::uint16_t>(v.get<std::uint64_t>());
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        return static_cast<std::uint16_t>(std::stoul(s, nullptr, 0));
    }
    throw ConfigError("manifest: field 'sim.frame.id' must be a number or hex string");
}

std::vector<std::uint8_t> parse_hex_bytes(const std::string& s, const std::string& field) {
    if (s.size() % 2 != 0)
        throw ConfigError("manifest: field '" + field + "' must hold an even number of hex digits");
    std::vector<std::uint8_t> out;
    out.reserve(s.size() / 2);
    for (std::size_t i = 0; i < s.size(); i += 2) {
        auto nibble = [&](char c) -> unsigned {
            if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
            if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
            if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
            throw ConfigError("manifest: field '" + field + "' holds a non-hex character");
        };
        out.push_back(static_cast<std::uint8_t>(nibble(s[i]) << 4 | nibble(s[i + 1])));
    }
    return out;
}

CanFrame parse_frame(const json& j) {
    CanFrame frame;
    frame.id = parse_frame_id(require(j, "id", "sim.frame."));
    frame.dlc = static_cast<std::uint8_t>(require_number(j, "dlc", "sim.frame."));
    if (auto it = j.find("data"); it != j.end() && it->is_string())
        frame.data = parse_hex_bytes(it->get<std::string>(), "sim.frame.data");
    if (auto it = j.find("rtr"); it != j.end())
        frame.rtr = it->get<bool>();
    try {
        validate(frame);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("manifest: sim.frame invalid: ") + e.what());
    }
    return frame;
}

ordered_json frame_to_json(const CanFrame& frame) {
    ordered_json j;
    char idbuf[8];
    std::snprintf(idbuf, sizeof(idbuf), "0x%03X", frame.id);
    j["id"] = idbuf;
    j["dlc"] = frame.dlc;
    std::string hex;
    for (std::uint8_t b : frame.data) {
        char bb[3];
        std::snprintf(bb, sizeof(bb), "%02X", b);
        hex += bb;
    }
    j["data"] = hex;
    j["rtr"] = frame.rtr;
    return j;
}

EcuProfile parse_ecu(const json& j, std::size_t index) {
    const std::string ctx = "sim.ecus[" + std::to_string(index) + "].";
    EcuProfile e;
    const json& id = require(j, "ecu_id", ctx);
    if (!id.is_string())
        throw ConfigError("manifest: field '" + ctx + "ecu_id' must be a string");
    e.ecu_id = id.get<std::string>();
    e.rise_time_s = require_number(j, "rise_time_s", ctx);
    e.fall_time_s = require_number(j, "fall_time_s", ctx);
    e.overshoot_frac = number_or(j, "overshoot_frac", 0.0);
    e.ring_freq_hz = number_or(j, "ring_freq_hz", 2.0e6);
    e.ring_damping = number_or(j, "ring_damping", 5.0e6);
    e.level_offset_v = number_or(j, "level_offset_v", 0.0);
    e.jitter_std_s = number_or(j, "jitter_std_s", 0.0);
    e.noise_std_v = number_or(j, "noise_std_v", 0.0);
    try {
        validate(e);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("manifest: ") + ctx + " invalid: " + err.what());
    }
    return e;
}

ordered_json ecu_to_json(const EcuProfile& e) {
    ordered_json j;
    j["ecu_id"] = e.ecu_id;
    j["rise_time_s"] = e.rise_time_s;
    j["fall_time_s"] = e.fall_time_s;
    j["overshoot_frac"] = e.overshoot_frac;
    j["ring_freq_hz"] = e.ring_freq_hz;
    j["ring_damping"] = e.ring_damping;
    j["level_offset_v"] = e.level_offset_v;
    j["jitter_std_s"] = e.jitter_std_s;
    j["noise_std_v"] = e.noise_std_v;
    return j;
}

ChannelProfile parse_channel(const json& j, std::size_t index) {
    const std::string ctx = "sim.channels[" + std::to_string(index) + "].";
    ChannelProfile c;
    const json& id = require(j, "channel_id", ctx);
    if (!id.is_string())
        throw ConfigError("manifest: field '" + ctx + "channel_id' must be a string");
    c.channel_id = id.get<std::string>();
    if (auto it = j.find("family"); it != j.end())
        c.family = cable_family_from_string(it->get<std::string>());
    c.length_m = number_or(j, "length_m", 1.0);
    if (auto it = j.find("taps"); it != j.end()) {
        if (!it->is_array())
            throw ConfigError("manifest: field '" + ctx + "taps' must be an array");
        c.taps = it->get<std::vector<double>>();
    } else {
        c.cutoff_hz = require_number(j, "cutoff_hz", ctx);
        c.q_factor = require_number(j, "q_factor", ctx);
        c.dc_gain = number_or(j, "dc_gain", 1.0);
    }
    try {
        validate(c);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("manifest: ") + ctx + " invalid: " + err.what());
    }
    return c;
}

ordered_json channel_to_json(const ChannelProfile& c) {
    ordered_json j;
    j["channel_id"] = c.channel_id;
    j["family"] = to_string(c.family);
    j["length_m"] = c.length_m;
    if (!c.taps.empty()) {
        j["taps"] = c.taps;
    } else {
        j["cutoff_hz"] = c.cutoff_hz;
        j["q_factor"] = c.q_factor;
        j["dc_gain"] = c.dc_gain;
    }
    return j;
}

TaskTrainConfig parse_task_train(const json& j, const TaskTrainConfig& defaults,
                                 const std::string& ctx) {
    TaskTrainConfig t = defaults;
    if (auto it = j.find("hidden"); it != j.end()) {
        if (!it->is_array())
            throw ConfigError("manifest: field '" + ctx + "hidden' must be an array");
        t.hidden = it->get<std::vector<int>>();
        for (int h : t.hidden)
            if (h < 1)
                throw ConfigError("manifest: field '" + ctx + "hidden' entries must be >= 1");
    }
    t.max_epochs = static_cast<int>(number_or(j, "max_epochs", t.max_epochs));
    t.grad_tol = number_or(j, "grad_tol", t.grad_tol);
    t.train_frac = number_or(j, "train_frac", t.train_frac);
    if (t.max_epochs < 1)
        throw ConfigError("manifest: field '" + ctx + "max_epochs' must be >= 1");
    if (!(t.train_frac > 0.0 && t.train_frac < 1.0))
        throw ConfigError("manifest: field '" + ctx + "train_frac' must be in (0, 1)");
    return t;
}

ordered_json task_train_to_json(const TaskTrainConfig& t) {
    ordered_json j;
    j["hidden"] = t.hidden;
    j["max_epochs"] = t.max_epochs;
    j["grad_tol"] = t.grad_tol;
    j["train_frac"] = t.train_frac;
    return j;
}

} // namespace

Manifest default_manifest() {
    Manifest m;
    m.seed = 1;
    m.sim.frame.id = 0x555;
    m.sim.frame.dlc = 8;
    m.sim.frame.data.assign(8, 0x55);
    m.sim.signaling = SignalingConfig{};
    m.sim.records_per_class = 3600;
    m.sim.window_len = 40;
    m.sim.idle_bits = 10;
    m.sim.rng_seed = m.seed;
    m.sim.ecus = default_ecu_bank();
    m.sim.channels = default_channel_bank();
    return m;
}

Manifest load_manifest(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest: JSON parse error in " + path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }

    const json& schema = require(j, "schema", "");
    if (!schema.is_number_integer() || schema.get<int>() != 1)
        throw ConfigError("manifest: unsupported schema version (expected 1)");

    Manifest m = default_manifest();
    if (auto it = j.find("seed"); it != j.end())
        m.seed = it->get<std::uint64_t>();
    m.sim.rng_seed = m.seed;

    const json& sim = require(j, "sim", "");
    if (auto it = sim.find("frame"); it != sim.end())
        m.sim.frame = parse_frame(*it);
    if (auto it = sim.find("signaling"); it != sim.end()) {
        const json& sg = *it;
        m.sim.signaling.bitrate_bps = number_or(sg, "bitrate_bps", m.sim.signaling.bitrate_bps);
        m.sim.signaling.sample_rate_hz = number_or(sg, "sample_rate_hz", m.sim.signaling.sample_rate_hz);
        m.sim.signaling.v_dom_diff = number_or(sg, "v_dom_diff", m.sim.signaling.v_dom_diff);
        m.sim.signaling.v_rec_diff = number_or(sg, "v_rec_diff", m.sim.signaling.v_rec_diff);
        try {
            validate(m.sim.signaling);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("manifest: ") + e.what());
        }
    }
    m.sim.records_per_class = static_cast<int>(number_or(sim, "records_per_class", m.sim.records_per_class));
    m.sim.window_len = static_cast<int>(number_or(sim, "window_len", m.sim.window_len));
    m.sim.idle_bits = static_cast<int>(number_or(sim, "idle_bits", m.sim.idle_bits));
    if (m.sim.records_per_class < 1)
        throw ConfigError("manifest: field 'sim.records_per_class' must be >= 1");
    if (m.sim.window_len < 8)
        throw ConfigError("manifest: field 'sim.window_len' must be >= 8");
    if (m.sim.idle_bits < 1)
        throw ConfigError("manifest: field 'sim.idle_bits' must be >= 1");

    if (auto it = sim.find("ecus"); it != sim.end() && !(it->is_string() && *it == "default")) {
        if (!it->is_array() || it->empty())
            throw ConfigError("manifest: field 'sim.ecus' must be \"default\" or a non-empty array");
        m.sim.ecus.clear();
        for (std::size_t i = 0; i < it->size(); ++i)
            m.sim.ecus.push_back(parse_ecu((*it)[i], i));
    }
    if (auto it = sim.find("channels"); it != sim.end() && !(it->is_string() && *it == "default")) {
        if (!it->is_array() || it->empty())
            throw ConfigError("manifest: field 'sim.channels' must be \"default\" or a non-empty array");
        m.sim.channels.clear();
        for (std::size_t i = 0; i < it->size(); ++i)
            m.sim.channels.push_back(parse_channel((*it)[i], i));
    }

    if (auto it = j.find("features"); it != j.end()) {
        m.feature_bins = static_cast<int>(number_or(*it, "n_bins", m.feature_bins));
        if (m.feature_bins < 2)
            throw ConfigError("manifest: field 'features.n_bins' must be >= 2");
    }
    if (auto it = j.find("train"); it != j.end()) {
        if (auto ch = it->find("channel"); ch != it->end())
            m.channel_train = parse_task_train(*ch, m.channel_train, "train.channel.");
        if (auto ec = it->find("ecu"); ec != it->end())
            m.ecu_train = parse_task_train(*ec, m.ecu_train, "train.ecu.");
    }
    if (auto it = j.find("paths"); it != j.end()) {
        for (auto& [key, value] : it->items()) {
            if (!value.is_string())
                throw ConfigError("manifest: field 'paths." + key + "' must be a string");
            m.paths[key] = value.get<std::string>();
        }
    }
    return m;
}

std::string manifest_to_json_string(const Manifest& m) {
    ordered_json j;
    j["schema"] = m.schema;
    j["seed"] = m.seed;
    ordered_json sim;
    sim["frame"] = frame_to_json(m.sim.frame);
    ordered_json sg;
    sg["bitrate_bps"] = m.sim.signaling.bitrate_bps;
    sg["sample_rate_hz"] = m.sim.signaling.sample_rate_hz;
    sg["v_dom_diff"] = m.sim.signaling.v_dom_diff;
    sg["v_rec_diff"] = m.sim.signaling.v_rec_diff;
    sim["signaling"] = sg;
    sim["records_per_class"] = m.sim.records_per_class;
    sim["window_len"] = m.sim.window_len;
    sim["idle_bits"] = m.sim.idle_bits;
    ordered_json ecus = ordered_json::array();
    for (const auto& e : m.sim.ecus) ecus.push_back(ecu_to_json(e));
    sim["ecus"] = ecus;
    ordered_json channels = ordered_json::array();
    for (const auto& c : m.sim.channels) channels.push_back(channel_to_json(c));
    sim["channels"] = channels;
    j["sim"] = sim;
    j["features"] = ordered_json{{"n_bins", m.feature_bins}};
    ordered_json train;
    train["channel"] = task_train_to_json(m.channel_train);
    train["ecu"] = task_train_to_json(m.ecu_train);
    j["train"] = train;
    ordered_json paths = ordered_json::object();
    for (const auto& [k, v] : m.paths) paths[k] = v;
    j["paths"] = paths;
    return j.dump(2) + "\n";
}

std::string config_hash(const Manifest& m) {
    return content_hash(manifest_to_json_string(m));
}

void write_records_csv(const std::string& path, const std::vector<RawRecord>& records,
                       const ArtifactMeta& meta) {
    std::ostringstream os;
    os << "# canprint records schema=1 seed=" << meta.seed << " config=" << meta.config_hash << "\n";
    std::size_t window = records.empty() ? 0 : records.front().samples.size();
    os << "ecu_id,channel_id,sample_rate_hz";
    for (std::size_t i = 0; i < window; ++i) os << ",s" << i;
    os << "\n";
    for (const auto& r : records) {
        if (r.samples.size() != window)
            throw std::invalid_argument("write_records_csv: ragged record lengths");
        os << r.ecu_id << "," << r.channel_id << "," << fmt_full(r.sample_rate_hz);
        for (double s : r.samples) os << "," << fmt_sample(s);
        os << "\n";
    }
    write_text_file(path, os.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream fs(line);
    while (std::getline(fs, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

} // namespace

std::vector<RawRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open records CSV: " + path);
    std::string line;
    std::vector<RawRecord> records;
    bool header_seen = false;
    std::size_t window = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            auto fields = split_csv_line(line);
            if (fields.size() < 4 || fields[0] != "ecu_id" || fields[1] != "channel_id" ||
                fields[2] != "sample_rate_hz")
                throw ConfigError("records CSV: unexpected header in " + path);
            window = fields.size() - 3;
            header_seen = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != window + 3)
            throw std::runtime_error("records CSV: row width mismatch in " + path);
        RawRecord r;
        r.ecu_id = fields[0];
        r.channel_id = fields[1];
        r.sample_rate_hz = std::stod(fields[2]);
        r.samples.reserve(window);
        for (std::size_t i = 3; i < fields.size(); ++i) r.samples.push_back(std::stod(fields[i]));
        records.push_back(std::move(r));
    }
    if (!header_seen)
        throw ConfigError("records CSV: no header found in " + path);
    return records;
}

void write_features_csv(const std::string& path, const std::vector<FeatureRow>& rows,
                        const ArtifactMeta& meta) {
    std::ostringstream os;
    os << "# canprint features schema=1 seed=" << meta.seed << " config=" << meta.config_hash << "\n";
    os << "ecu_id,channel_id";
    for (const char* name : FeatureVector::names()) os << "," << name;
    os << "\n";
    for (const auto& r : rows) {
        os << r.ecu_id << "," << r.channel_id;
        for (double v : r.values) os << "," << fmt_full(v);
        os << "\n";
    }
    write_text_file(path, os.str());
}

std::vector<FeatureRow> read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open features CSV: " + path);
    std::string line;
    std::vector<FeatureRow> rows;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            auto fields = split_csv_line(line);
            if (fields.size() != 13 || fields[0] != "ecu_id" || fields[1] != "channel_id")
                throw ConfigError("features CSV: unexpected header in " + path);
            for (std::size_t i = 0; i < 11; ++i)
                if (fields[i + 2] != FeatureVector::names()[i])
                    throw ConfigError("features CSV: unexpected feature column '" + fields[i + 2] +
                                      "' in " + path);
            header_seen = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 13)
            throw std::runtime_error("features CSV: row width mismatch in " + path);
        FeatureRow r;
        r.ecu_id = fields[0];
        r.channel_id = fields[1];
        for (std::size_t i = 0; i < 11; ++i) r.values[i] = std::stod(fields[i + 2]);
        rows.push_back(std::move(r));
    }
    if (!header_seen)
        throw ConfigError("features CSV: no header found in " + path);
    return rows;
}

void write_trace_csv(const std::string& path, const TrainTrace& trace, const ArtifactMeta& meta) {
    std::ostringstream os;
    os << "# canprint trace schema=1 seed=" << meta.seed << " config=" << meta.config_hash << "\n";
    os << "epoch,loss,grad_inf\n";
    for (std::size_t i = 0; i < trace.loss.size(); ++i)
        os << (i + 1) << "," << fmt_full(trace.loss[i]) << "," << fmt_full(trace.grad_inf[i]) << "\n";
    write_text_file(path, os.str());
}

void save_model_json(const std::string& path, const MlpModel& model, const ArtifactMeta& meta) {
    ordered_json j;
    j["schema"] = 1;
    j["kind"] = "canprint-mlp";
    j["seed"] = meta.seed;
    j["config_hash"] = meta.config_hash;
    j["layer_sizes"] = model.layer_sizes;
    j["hidden_activation"] = "tanh";
    j["output_activation"] = "softmax";
    auto weights = ordered_json::array();
    for (const auto& w : model.weights) {
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index i = 0; i < w.rows(); ++i)  // row-major
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                flat.push_back(w(i, c));
        weights.push_back(flat);
    }
    j["weights"] = weights;
    auto biases = ordered_json::array();
    for (const auto& b : model.biases)
        biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
    j["biases"] = biases;
    j["norm_mean"] = std::vector<double>(model.norm_mean.data(), model.norm_mean.data() + model.norm_mean.size());
    j["norm_std"] = std::vector<double>(model.norm_std.data(), model.norm_std.data() + model.norm_std.size());
    j["class_names"] = model.class_names;
    ordered_json training;
    training["rng_seed"] = model.seed;
    training["epochs_run"] = model.epochs_run;
    training["final_loss"] = model.final_loss;
    training["final_grad_inf"] = model.final_grad_inf;
    j["training"] = training;
    write_text_file(path, j.dump(2) + "\n");
}

MlpModel load_model_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("model: JSON parse error in " + path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
        throw ConfigError("model: unsupported schema version in " + path);
    if (!j.contains("kind") || j["kind"].get<std::string>() != "canprint-mlp")
        throw ConfigError("model: unexpected kind in " + path);

    MlpModel model;
    model.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    if (model.layer_sizes.size() < 2)
        throw ConfigError("model: layer_sizes must hold at least 2 entries");
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() != model.layer_sizes.size() - 1 || biases.size() != weights.size())
        throw ConfigError("model: weight/bias array count does not match layer_sizes");
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        Eigen::Index rows = model.layer_sizes[l];
        Eigen::Index cols = model.layer_sizes[l + 1];
        auto flat = weights[l].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
            throw ConfigError("model: weight matrix " + std::to_string(l) + " has wrong size");
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index c = 0; c < cols; ++c)
                w(i, c) = flat[static_cast<std::size_t>(i * cols + c)];
        auto bvec = biases[l].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(bvec.size()) != cols)
            throw ConfigError("model: bias vector " + std::to_string(l) + " has wrong size");
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::Map<Eigen::VectorXd>(bvec.data(), cols));
    }
    auto mean = j.at("norm_mean").get<std::vector<double>>();
    auto stdv = j.at("norm_std").get<std::vector<double>>();
    if (static_cast<int>(mean.size()) != model.layer_sizes.front() || stdv.size() != mean.size())
        throw ConfigError("model: norm_mean/norm_std size does not match the input layer");
    model.norm_mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    model.norm_std = Eigen::Map<Eigen::VectorXd>(stdv.data(), static_cast<Eigen::Index>(stdv.size()));
    if (j.contains("class_names"))
        model.class_names = j["class_names"].get<std::vector<std::string>>();
    if (j.contains("training")) {
        const auto& t = j["training"];
        model.seed = t.value("rng_seed", std::uint64_t{0});
        model.epochs_run = t.value("epochs_run", 0);
        model.final_loss = t.value("final_loss", 0.0);
        model.final_grad_inf = t.value("final_grad_inf", 0.0);
    }
    return model;
}

void write_ranking_json(const std::string& path, const RankingResult& ranking,
                        const std::vector<std::string>& feature_names, const ArtifactMeta& meta) {
    ordered_json j;
    j["schema"] = 1;
    j["kind"] = "canprint-ranking";
    j["seed"] = meta.seed;
    j["config_hash"] = meta.config_hash;
    j["n_bins"] = ranking.n_bins;
    j["order"] = ranking.order;
    j["scores"] = ranking.scores;
    auto names = ordered_json::array();
    for (int idx : ranking.order) {
        if (idx >= 0 && static_cast<std::size_t>(idx) < feature_names.size())
            names.push_back(feature_names[static_cast<std::size_t>(idx)]);
        else
            names.push_back("f" + std::to_string(idx));
    }
    j["ordered_names"] = names;
    write_text_file(path, j.dump(2) + "\n");
}

Waveform read_scope_csv(const std::string& path, double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("read_scope_csv: sample_rate_hz must be positive");
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scope CSV: " + path);

    std::vector<double> times, volts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (fields.size() < 2) continue;
        char* end = nullptr;
        double t = std::strtod(fields[0].c_str(), &end);
        if (end == fields[0].c_str()) continue;  // header or junk row
        times.push_back(t);
        volts.push_back(std::stod(fields[1]));
    }
    if (times.size() < 2)
        throw std::runtime_error("scope CSV: need at least 2 numeric (time, volts) rows in " + path);
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::runtime_error("scope CSV: time column must be strictly increasing in " + path);

    Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    const double t0 = times.front();
    const double t_end = times.back();
    const double dt = 1.0 / sample_rate_hz;
    std::size_t count = static_cast<std::size_t>(std::floor((t_end - t0) / dt)) + 1;
    w.samples.reserve(count);
    std::size_t hi = 1;
    for (std::size_t k = 0; k < count; ++k) {
        double t = t0 + static_cast<double>(k) * dt;
        if (t > t_end) break;
        while (hi + 1 < times.size() && times[hi] < t) ++hi;
        double t1 = times[hi - 1], t2 = times[hi];
        double v1 = volts[hi - 1], v2 = volts[hi];
        double alpha = (t - t1) / (t2 - t1);
        w.samples.push_back(v1 + alpha * (v2 - v1));
    }
    return w;
}

} // namespace canprint
