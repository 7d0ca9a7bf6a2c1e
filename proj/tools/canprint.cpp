// canprint: CAN-bus physical-layer fingerprinting toolkit.
//
// Pipeline: simulate (or import) -> extract -> train -> eval / identify,
// with rank available for feature-selection studies. All commands are
// deterministic given their inputs and --seed; artifacts embed the seed and
// a hash of the effective configuration.
#include <cstdio>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "canprint/canframe.hpp"
#include "canprint/channelsim.hpp"
#include "canprint/evalkit.hpp"
#include "canprint/features.hpp"
#include "canprint/featsel.hpp"
#include "canprint/io.hpp"
#include "canprint/mlp.hpp"
#include "canprint/parallel.hpp"
#include "canprint/rng.hpp"

using namespace canprint;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitUnknown = 4;
constexpr int kExitNumeric = 5;

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Builds a labeled dataset from feature rows; task picks the label column.
LabeledDataset dataset_for_task(const std::vector<FeatureRow>& rows, const std::string& task) {
    if (rows.empty())
        throw ConfigError("features CSV holds no rows");
    std::set<std::string> classes;
    for (const auto& r : rows)
        classes.insert(task == "ecu" ? r.ecu_id : r.channel_id);

    LabeledDataset d;
    d.class_names.assign(classes.begin(), classes.end());
    d.x.resize(static_cast<Eigen::Index>(rows.size()), 11);
    d.y.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < 11; ++j)
            d.x(static_cast<Eigen::Index>(i), j) = rows[i].values[static_cast<std::size_t>(j)];
        const std::string& label = task == "ecu" ? rows[i].ecu_id : rows[i].channel_id;
        auto it = classes.find(label);
        d.y.push_back(static_cast<int>(std::distance(classes.begin(), it)));
    }
    return d;
}

// Picks the label column whose distinct values equal the model's classes.
std::string infer_task(const std::vector<FeatureRow>& rows, const MlpModel& model,
                       const std::string& requested) {
    if (requested != "auto") return requested;
    std::set<std::string> ecu_set, ch_set, model_set(model.class_names.begin(),
                                                     model.class_names.end());
    for (const auto& r : rows) {
        ecu_set.insert(r.ecu_id);
        ch_set.insert(r.channel_id);
    }
    bool ecu_ok = ecu_set == model_set;
    bool ch_ok = ch_set == model_set;
    if (ecu_ok == ch_ok)
        throw ConfigError("cannot infer label column from the model's classes; pass --task");
    return ecu_ok ? "ecu" : "channel";
}

std::string meta_hash(const ordered_json& effective) {
    return content_hash(effective.dump());
}

int cmd_simulate(const std::string& manifest_path, std::string out, std::string summary,
                 const std::string& overlay, bool seed_set, std::uint64_t seed_override) {
    Manifest m = load_manifest(manifest_path);
    if (seed_set) {
        m.seed = seed_override;
        m.sim.rng_seed = seed_override;
    }
    if (out.empty()) out = m.paths.count("records") ? m.paths["records"] : "records.csv";
    if (summary.empty())
        summary = m.paths.count("summary") ? m.paths["summary"] : out + ".summary.json";

    ArtifactMeta meta{m.seed, config_hash(m)};
    auto records = generate_dataset(m.sim);
    write_records_csv(out, records, meta);

    ordered_json js;
    js["schema"] = 1;
    js["kind"] = "canprint-summary";
    js["seed"] = m.seed;
    js["config_hash"] = meta.config_hash;
    js["sample_rate_hz"] = m.sim.signaling.sample_rate_hz;
    js["window_len"] = m.sim.window_len;
    js["records_per_class"] = m.sim.records_per_class;
    js["total_records"] = records.size();
    ordered_json classes = ordered_json::array();
    for (const auto& e : m.sim.ecus)
        for (const auto& c : m.sim.channels)
            classes.push_back(ordered_json{{"ecu_id", e.ecu_id},
                                           {"channel_id", c.channel_id},
                                           {"records", m.sim.records_per_class}});
    js["classes"] = classes;
    js["config"] = nlohmann::ordered_json::parse(manifest_to_json_string(m));
    write_text_file(summary, js.dump(2) + "\n");

    if (!overlay.empty()) {
        // first-repetition received waveform per (ecu, channel), one column each
        BitSequence bits = encode_frame(m.sim.frame);
        std::vector<std::uint8_t> all_bits(static_cast<std::size_t>(m.sim.idle_bits), 1);
        all_bits.insert(all_bits.end(), bits.bits.begin(), bits.bits.end());
        Waveform ideal = render_waveform(all_bits, m.sim.signaling);
        std::vector<std::vector<double>> traces;
        std::vector<std::string> names;
        for (const auto& e : m.sim.ecus) {
            for (const auto& c : m.sim.channels) {
                std::uint64_t sub = mix_seed(mix_seed(m.sim.rng_seed, e.ecu_id), c.channel_id);
                Waveform sent = shape_transmit(ideal, e, mix_seed(sub, std::uint64_t{0}));
                traces.push_back(apply_channel(sent, c).samples);
                names.push_back(e.ecu_id + "|" + c.channel_id);
            }
        }
        std::string text = "# canprint overlay schema=1 seed=" + std::to_string(m.seed) +
                           " config=" + meta.config_hash + "\n";
        text += "time_s";
        for (const auto& n : names) text += "," + n;
        text += "\n";
        for (std::size_t i = 0; i < traces.front().size(); ++i) {
            text += fmt_full(static_cast<double>(i) / m.sim.signaling.sample_rate_hz);
            for (const auto& t : traces) text += "," + fmt_full(t[i]);
            text += "\n";
        }
        write_text_file(overlay, text);
    }

    std::cout << "wrote " << records.size() << " records to " << out << " (seed " << m.seed
              << ", config " << meta.config_hash << ")\n";
    return kExitOk;
}

int cmd_import(const std::string& in, double sample_rate, int window, const std::string& ecu_id,
               const std::string& channel_id, double v_dom, double v_rec,
               const std::string& out) {
    Waveform w = read_scope_csv(in, sample_rate);
    w.ecu_id = ecu_id;
    w.channel_id = channel_id;
    double threshold = v_rec + 0.5 * (v_dom - v_rec);
    auto records = segment_into_records(w, window, threshold,
                                        std::numeric_limits<std::size_t>::max());
    if (records.empty())
        throw std::runtime_error("import: no dominant edge found (or capture shorter than one window)");

    ordered_json effective;
    effective["command"] = "import";
    effective["input_hash"] = file_hash(in);
    effective["sample_rate_hz"] = sample_rate;
    effective["window_len"] = window;
    effective["v_dom_diff"] = v_dom;
    effective["v_rec_diff"] = v_rec;
    effective["ecu_id"] = ecu_id;
    effective["channel_id"] = channel_id;
    write_records_csv(out, records, ArtifactMeta{0, meta_hash(effective)});
    std::cout << "imported " << records.size() << " records to " << out << "\n";
    return kExitOk;
}

int cmd_extract(const std::string& records_path, const std::string& out) {
    auto records = read_records_csv(records_path);
    if (records.empty())
        throw ConfigError("records CSV holds no rows: " + records_path);

    std::vector<FeatureRow> rows(records.size());
    std::vector<int> degenerate(records.size(), 0);
    std::vector<std::string> failures(records.size());
    parallel_for(records.size(), [&](std::size_t i) {
        try {
            FeatureVector v = extract(records[i].samples, records[i].sample_rate_hz);
            rows[i].ecu_id = records[i].ecu_id;
            rows[i].channel_id = records[i].channel_id;
            rows[i].values = v.values();
            degenerate[i] = v.degenerate ? 1 : 0;
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw std::runtime_error("extract: record " + std::to_string(i) + ": " + failures[i]);

    ordered_json effective;
    effective["command"] = "extract";
    effective["input_hash"] = file_hash(records_path);
    write_features_csv(out, rows, ArtifactMeta{0, meta_hash(effective)});

    int warn = 0;
    for (int d : degenerate) warn += d;
    if (warn > 0)
        std::cerr << "warning: " << warn << " record(s) had degenerate moments (flagged 0)\n";
    std::cout << "extracted " << rows.size() << " feature vectors to " << out << "\n";
    return kExitOk;
}

int cmd_rank(const std::string& features_path, const std::string& task, int k, int bins,
             const std::string& out, std::uint64_t seed) {
    auto rows = read_features_csv(features_path);
    LabeledDataset d = dataset_for_task(rows, task);
    if (k < 1 || k > 11)
        throw ConfigError("rank: --k must be in [1, 11]");

    std::vector<std::vector<double>> columns(11);
    for (auto& c : columns) c.reserve(rows.size());
    for (const auto& r : rows)
        for (std::size_t j = 0; j < 11; ++j) columns[j].push_back(r.values[j]);

    DiscretizedMatrix dm = discretize(columns, bins);
    RankingResult ranking = jmi_rank(dm, d.y, k);

    ordered_json effective;
    effective["command"] = "rank";
    effective["input_hash"] = file_hash(features_path);
    effective["task"] = task;
    effective["k"] = k;
    effective["n_bins"] = bins;
    std::vector<std::string> names(FeatureVector::names().begin(), FeatureVector::names().end());
    write_ranking_json(out, ranking, names, ArtifactMeta{seed, meta_hash(effective)});
    std::cout << "ranked " << k << " features to " << out << "\n";
    return kExitOk;
}

int cmd_train(const std::string& features_path, const std::string& task, std::string hidden_csv,
              int epochs, double grad_tol, double train_frac, bool no_stratify,
              std::uint64_t seed, const std::string& out, const std::string& trace_path,
              const std::string& test_out) {
    auto rows = read_features_csv(features_path);
    LabeledDataset full = dataset_for_task(rows, task);
    const int n_classes = static_cast<int>(full.class_names.size());
    if (n_classes < 2)
        throw ConfigError("train: need at least 2 classes for task '" + task + "'");

    if (hidden_csv.empty()) hidden_csv = task == "ecu" ? "20" : "50,40,40";
    std::vector<int> layers{11};
    {
        std::stringstream ss(hidden_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            int v = std::stoi(tok);
            if (v < 1) throw ConfigError("train: hidden layer sizes must be >= 1");
            layers.push_back(v);
        }
    }
    layers.push_back(n_classes);

    LabeledDataset train_set = full;
    std::vector<std::size_t> test_indices;
    if (train_frac < 1.0) {
        SplitResult s = split(full, train_frac, seed, !no_stratify);
        train_set = std::move(s.train);
        test_indices = std::move(s.test_indices);
    }

    MlpModel model = init_model(layers, seed);
    TrainConfig cfg;
    cfg.max_epochs = epochs;
    cfg.grad_tol = grad_tol;
    cfg.rng_seed = seed;
    TrainTrace trace = train_scg(model, train_set, cfg);

    ordered_json effective;
    effective["command"] = "train";
    effective["input_hash"] = file_hash(features_path);
    effective["task"] = task;
    effective["layers"] = layers;
    effective["max_epochs"] = epochs;
    effective["grad_tol"] = grad_tol;
    effective["train_frac"] = train_frac;
    effective["stratified"] = !no_stratify;
    effective["seed"] = seed;
    ArtifactMeta meta{seed, meta_hash(effective)};
    save_model_json(out, model, meta);
    if (!trace_path.empty()) write_trace_csv(trace_path, trace, meta);
    if (!test_out.empty()) {
        std::vector<FeatureRow> held_out;
        held_out.reserve(test_indices.size());
        for (std::size_t idx : test_indices) held_out.push_back(rows[idx]);
        write_features_csv(test_out, held_out, meta);
    }

    std::cout << "trained " << task << " model: layers [";
    for (std::size_t i = 0; i < layers.size(); ++i)
        std::cout << layers[i] << (i + 1 < layers.size() ? "," : "");
    std::cout << "], epochs " << model.epochs_run << " (" << trace.stop_reason << "), final loss "
              << model.final_loss << ", grad_inf " << model.final_grad_inf << "\n";
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& features_path,
             const std::string& task_flag, const std::string& format, const std::string& out) {
    MlpModel model = load_model_json(model_path);
    auto rows = read_features_csv(features_path);
    std::string task = infer_task(rows, model, task_flag);
    LabeledDataset d = dataset_for_task(rows, task);
    if (d.class_names != model.class_names)
        throw ConfigError("eval: feature labels do not match the model's classes (task '" + task +
                          "')");

    ConfusionMatrix cm = evaluate(model, d);
    ReportFormat fmt = format == "csv"    ? ReportFormat::Csv
                       : format == "json" ? ReportFormat::Json
                                          : ReportFormat::Text;
    std::string report = render_report(cm, fmt);
    if (out.empty()) {
        std::cout << report;
    } else {
        write_text_file(out, report);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * cm.accuracy());
    std::cout << "accuracy " << buf << "\n";
    return kExitOk;
}

int cmd_identify(const std::string& model_path, const std::string& features_path,
                 const std::string& records_path, long row, const std::string& claimed,
                 double threshold, const std::string& out) {
    MlpModel model = load_model_json(model_path);
    Eigen::VectorXd x(11);
    if (!features_path.empty()) {
        auto rows = read_features_csv(features_path);
        if (row < 0 || static_cast<std::size_t>(row) >= rows.size())
            throw ConfigError("identify: --row out of range");
        for (int j = 0; j < 11; ++j) x[j] = rows[static_cast<std::size_t>(row)].values[static_cast<std::size_t>(j)];
    } else if (!records_path.empty()) {
        auto records = read_records_csv(records_path);
        if (row < 0 || static_cast<std::size_t>(row) >= records.size())
            throw ConfigError("identify: --row out of range");
        const auto& rec = records[static_cast<std::size_t>(row)];
        FeatureVector v = extract(rec.samples, rec.sample_rate_hz);
        auto vals = v.values();
        for (int j = 0; j < 11; ++j) x[j] = vals[static_cast<std::size_t>(j)];
    } else {
        throw ConfigError("identify: pass --features or --records");
    }

    IdentityVerdict v = identify(model, x, claimed, threshold);

    ordered_json js;
    js["schema"] = 1;
    js["kind"] = "canprint-verdict";
    js["claimed_class"] = v.claimed_class;
    js["predicted_class"] = v.predicted_class;
    js["confidence"] = v.confidence;
    js["threshold"] = v.threshold;
    js["verdict"] = to_string(v.verdict);
    std::string text = js.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text_file(out, text);
        std::cout << to_string(v.verdict) << " (confidence " << v.confidence << ")\n";
    }
    switch (v.verdict) {
        case Verdict::MATCH: return kExitOk;
        case Verdict::MISMATCH: return kExitMismatch;
        case Verdict::UNKNOWN: return kExitUnknown;
    }
    return kExitUnknown;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CAN-bus physical-layer fingerprinting toolkit"};
    app.require_subcommand(1);

    // init-manifest
    auto* sc_init = app.add_subcommand("init-manifest", "Write the default pipeline manifest");
    std::string init_out = "manifest.json";
    sc_init->add_option("--out", init_out, "Output manifest path");

    // simulate
    auto* sc_sim = app.add_subcommand("simulate", "Synthesize labeled raw records from a manifest");
    std::string sim_manifest, sim_out, sim_summary, sim_overlay;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    sc_sim->add_option("--manifest", sim_manifest, "Manifest JSON")->required();
    sc_sim->add_option("--out", sim_out, "Records CSV path");
    sc_sim->add_option("--summary", sim_summary, "Summary JSON path");
    sc_sim->add_option("--overlay", sim_overlay, "Waveform overlay CSV (one received frame per class)");
    sc_sim->add_option("--seed", sim_seed, "Override the manifest seed")
        ->each([&](const std::string&) { sim_seed_set = true; });

    // import
    auto* sc_imp = app.add_subcommand("import", "Convert an oscilloscope time,volts CSV into records");
    std::string imp_in, imp_out = "records.csv", imp_ecu = "unknown", imp_channel = "unknown";
    double imp_rate = 10e6, imp_vdom = 2.0, imp_vrec = 0.0;
    int imp_window = 40;
    sc_imp->add_option("--in", imp_in, "Capture CSV (time, volts)")->required();
    sc_imp->add_option("--sample-rate", imp_rate, "Target sample rate in Hz");
    sc_imp->add_option("--window", imp_window, "Samples per record");
    sc_imp->add_option("--ecu-id", imp_ecu, "Label for the capture's transmitter");
    sc_imp->add_option("--channel-id", imp_channel, "Label for the capture's channel");
    sc_imp->add_option("--v-dom", imp_vdom, "Dominant differential level");
    sc_imp->add_option("--v-rec", imp_vrec, "Recessive differential level");
    sc_imp->add_option("--out", imp_out, "Records CSV path");

    // extract
    auto* sc_ext = app.add_subcommand("extract", "Compute the 11 features per record");
    std::string ext_records, ext_out = "features.csv";
    sc_ext->add_option("--records", ext_records, "Records CSV")->required();
    sc_ext->add_option("--out", ext_out, "Features CSV path");

    // rank
    auto* sc_rank = app.add_subcommand("rank", "Rank features by joint mutual information");
    std::string rank_features, rank_out = "ranking.json", rank_task = "channel";
    int rank_k = 11, rank_bins = 10;
    std::uint64_t rank_seed = 0;
    sc_rank->add_option("--features", rank_features, "Features CSV")->required();
    sc_rank->add_option("--task", rank_task, "Label column: channel or ecu")
        ->check(CLI::IsMember({"channel", "ecu"}));
    sc_rank->add_option("--k", rank_k, "Number of features to select");
    sc_rank->add_option("--bins", rank_bins, "Equal-width bins per feature");
    sc_rank->add_option("--seed", rank_seed, "Seed echoed into the artifact");
    sc_rank->add_option("--out", rank_out, "Ranking JSON path");

    // train
    auto* sc_train = app.add_subcommand("train", "Train an MLP classifier with scaled conjugate gradient");
    std::string train_features, train_task, train_hidden, train_out = "model.json";
    std::string train_trace, train_test_out;
    int train_epochs = 2000;
    double train_grad_tol = 1e-7, train_frac = 0.65;
    bool train_no_strat = false;
    std::uint64_t train_seed = 0;
    sc_train->add_option("--features", train_features, "Features CSV")->required();
    sc_train->add_option("--task", train_task, "channel or ecu")
        ->required()
        ->check(CLI::IsMember({"channel", "ecu"}));
    sc_train->add_option("--hidden", train_hidden, "Hidden layer sizes, e.g. 50,40,40");
    sc_train->add_option("--epochs", train_epochs, "Maximum training epochs");
    sc_train->add_option("--grad-tol", train_grad_tol, "Gradient infinity-norm stop tolerance");
    sc_train->add_option("--train-frac", train_frac, "Training fraction (1.0 trains on all rows)");
    sc_train->add_flag("--no-stratify", train_no_strat, "Disable stratified splitting");
    sc_train->add_option("--seed", train_seed, "Seed for split and initialization");
    sc_train->add_option("--out", train_out, "Model JSON path");
    sc_train->add_option("--trace", train_trace, "Training trace CSV (epoch, loss, grad_inf)");
    sc_train->add_option("--test-out", train_test_out, "Write the held-out rows as a features CSV");

    // eval
    auto* sc_eval = app.add_subcommand("eval", "Evaluate a model into a confusion-matrix report");
    std::string eval_model, eval_features, eval_task = "auto", eval_format = "text", eval_out;
    sc_eval->add_option("--model", eval_model, "Model JSON")->required();
    sc_eval->add_option("--features", eval_features, "Features CSV")->required();
    sc_eval->add_option("--task", eval_task, "Label column: auto, channel or ecu")
        ->check(CLI::IsMember({"auto", "channel", "ecu"}));
    sc_eval->add_option("--format", eval_format, "Report format")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    sc_eval->add_option("--out", eval_out, "Report path (stdout when omitted)");

    // identify
    auto* sc_id = app.add_subcommand("identify", "Check a record against its claimed transmitter");
    std::string id_model, id_features, id_records, id_claimed, id_out;
    long id_row = 0;
    double id_threshold = 0.9;
    sc_id->add_option("--model", id_model, "Model JSON")->required();
    sc_id->add_option("--features", id_features, "Features CSV to take the row from");
    sc_id->add_option("--records", id_records, "Records CSV to extract the row from");
    sc_id->add_option("--row", id_row, "Row index into the chosen CSV");
    sc_id->add_option("--claimed", id_claimed, "Claimed class name")->required();
    sc_id->add_option("--threshold", id_threshold, "Minimum confidence for a definite verdict");
    sc_id->add_option("--out", id_out, "Verdict JSON path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sc_init->parsed()) {
            write_text_file(init_out, manifest_to_json_string(default_manifest()));
            std::cout << "wrote " << init_out << "\n";
            return kExitOk;
        }
        if (sc_sim->parsed())
            return cmd_simulate(sim_manifest, sim_out, sim_summary, sim_overlay, sim_seed_set, sim_seed);
        if (sc_imp->parsed())
            return cmd_import(imp_in, imp_rate, imp_window, imp_ecu, imp_channel, imp_vdom,
                              imp_vrec, imp_out);
        if (sc_ext->parsed()) return cmd_extract(ext_records, ext_out);
        if (sc_rank->parsed())
            return cmd_rank(rank_features, rank_task, rank_k, rank_bins, rank_out, rank_seed);
        if (sc_train->parsed())
            return cmd_train(train_features, train_task, train_hidden, train_epochs, train_grad_tol,
                             train_frac, train_no_strat, train_seed, train_out, train_trace,
                             train_test_out);
        if (sc_eval->parsed())
            return cmd_eval(eval_model, eval_features, eval_task, eval_format, eval_out);
        if (sc_id->parsed())
            return cmd_identify(id_model, id_features, id_records, id_row, id_claimed,
                                id_threshold, id_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
