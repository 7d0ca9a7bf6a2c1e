#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "canprint/io.hpp"

using namespace canprint;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("canprint_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("records CSV round-trips labels and samples") {
    TempDir dir;
    std::vector<RawRecord> records;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> dist(-1.0, 3.0);
    for (int i = 0; i < 7; ++i) {
        RawRecord r;
        r.ecu_id = "ECU" + std::to_string(i % 2 + 1);
        r.channel_id = "GXL-1m";
        r.sample_rate_hz = 10e6;
        for (int j = 0; j < 40; ++j) r.samples.push_back(dist(gen));
        records.push_back(r);
    }
    std::string path = dir.file("records.csv");
    write_records_csv(path, records, {42, "a1b2c3"});
    auto back = read_records_csv(path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].ecu_id == records[i].ecu_id);
        CHECK(back[i].channel_id == records[i].channel_id);
        CHECK(back[i].sample_rate_hz == records[i].sample_rate_hz);
        REQUIRE(back[i].samples.size() == 40);
        for (std::size_t j = 0; j < 40; ++j)
            CHECK(back[i].samples[j] ==
                  doctest::Approx(records[i].samples[j]).epsilon(1e-8));
    }
    // provenance comment is present
    std::string text = read_text_file(path);
    CHECK(text.find("seed=42") != std::string::npos);
    CHECK(text.find("config=a1b2c3") != std::string::npos);
}

TEST_CASE("features CSV round-trips exactly at full precision") {
    TempDir dir;
    std::vector<FeatureRow> rows;
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 9; ++i) {
        FeatureRow r;
        r.ecu_id = "E";
        r.channel_id = "C" + std::to_string(i % 3);
        for (auto& v : r.values) v = dist(gen);
        rows.push_back(r);
    }
    std::string path = dir.file("features.csv");
    write_features_csv(path, rows, {7, "deadbeef"});
    auto back = read_features_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < 11; ++j)
            CHECK(back[i].values[j] == rows[i].values[j]);
}

TEST_CASE("manifest defaults, overrides and validation") {
    TempDir dir;
    SUBCASE("default manifest round-trips and hashes stably") {
        Manifest m = default_manifest();
        CHECK(m.sim.ecus.size() == 4);
        CHECK(m.sim.channels.size() == 18);
        std::string path = dir.file("manifest.json");
        write_text_file(path, manifest_to_json_string(m));
        Manifest loaded = load_manifest(path);
        CHECK(config_hash(loaded) == config_hash(m));
        CHECK(loaded.sim.records_per_class == 3600);
        CHECK(loaded.sim.window_len == 40);
        CHECK(loaded.channel_train.hidden == std::vector<int>{50, 40, 40});
        CHECK(loaded.ecu_train.hidden == std::vector<int>{20});
        CHECK(loaded.channel_train.max_epochs == 2000);
        CHECK(loaded.channel_train.grad_tol == 1e-7);
        CHECK(loaded.channel_train.train_frac == 0.65);
    }
    SUBCASE("seed changes the config hash") {
        Manifest a = default_manifest();
        Manifest b = default_manifest();
        b.seed = 999;
        CHECK(config_hash(a) != config_hash(b));
    }
    SUBCASE("unknown schema version is rejected") {
        std::string path = dir.file("bad.json");
        write_text_file(path, "{\"schema\": 2, \"sim\": {}}\n");
        CHECK_THROWS_AS(load_manifest(path), ConfigError);
    }
    SUBCASE("errors name the offending field") {
        std::string path = dir.file("bad2.json");
        write_text_file(path, "{\"schema\": 1, \"sim\": {\"records_per_class\": 0}}\n");
        try {
            load_manifest(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("records_per_class") != std::string::npos);
        }
    }
    SUBCASE("default banks may be spelled out") {
        std::string path = dir.file("banks.json");
        write_text_file(path,
                        "{\"schema\":1,\"sim\":{\"ecus\":\"default\",\"channels\":\"default\"}}\n");
        Manifest m = load_manifest(path);
        CHECK(m.sim.ecus.size() == 4);
        CHECK(m.sim.channels.size() == 18);
    }
}

TEST_CASE("model JSON round-trips parameters and metadata") {
    TempDir dir;
    MlpModel model = init_model({11, 20, 4}, 77);
    model.class_names = {"E1", "E2", "E3", "E4"};
    model.norm_mean.setConstant(0.25);
    model.norm_std.setConstant(2.0);
    model.epochs_run = 123;
    model.final_loss = 0.0125;
    model.final_grad_inf = 3e-6;

    std::string path = dir.file("model.json");
    save_model_json(path, model, {77, "cafe0123"});
    MlpModel back = load_model_json(path);
    CHECK(back.layer_sizes == model.layer_sizes);
    CHECK(pack_parameters(back) == pack_parameters(model));
    CHECK(back.norm_mean == model.norm_mean);
    CHECK(back.norm_std == model.norm_std);
    CHECK(back.class_names == model.class_names);
    CHECK(back.epochs_run == 123);
    CHECK(back.final_loss == 0.0125);

    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(11, -1.0, 1.0);
    CHECK(forward(model, x) == forward(back, x));
}

TEST_CASE("model JSON schema violations are rejected") {
    TempDir dir;
    std::string path = dir.file("notamodel.json");
    write_text_file(path, "{\"schema\": 1, \"kind\": \"other\"}\n");
    CHECK_THROWS_AS(load_model_json(path), ConfigError);
    write_text_file(path, "not json");
    CHECK_THROWS_AS(load_model_json(path), ConfigError);
}

TEST_CASE("scope CSV import resamples by linear interpolation") {
    TempDir dir;
    std::string path = dir.file("scope.csv");
    // 1 MHz ramp sampled at 1 MS/s; resampled to 4 MS/s must interpolate
    std::string text = "time,volts\n";
    for (int i = 0; i <= 10; ++i) {
        char line[64];
        std::snprintf(line, sizeof(line), "%.9g,%.9g\n", i * 1e-6, static_cast<double>(i));
        text += line;
    }
    write_text_file(path, text);
    Waveform w = read_scope_csv(path, 4e6);
    REQUIRE(w.samples.size() == 41);
    CHECK(w.sample_rate_hz == 4e6);
    CHECK(w.samples[0] == doctest::Approx(0.0));
    CHECK(w.samples[1] == doctest::Approx(0.25));
    CHECK(w.samples[2] == doctest::Approx(0.5));
    CHECK(w.samples[40] == doctest::Approx(10.0));
}

TEST_CASE("scope CSV rejects non-increasing time") {
    TempDir dir;
    std::string path = dir.file("bad_scope.csv");
    write_text_file(path, "0.0,1.0\n0.0,2.0\n");
    CHECK_THROWS_AS(read_scope_csv(path, 1e6), std::runtime_error);
}

TEST_CASE("trace CSV lists one row per epoch") {
    TempDir dir;
    TrainTrace trace;
    trace.loss = {1.0, 0.5, 0.25};
    trace.grad_inf = {0.9, 0.4, 0.1};
    std::string path = dir.file("trace.csv");
    write_trace_csv(path, trace, {1, "ff"});
    std::string text = read_text_file(path);
    CHECK(text.find("epoch,loss,grad_inf") != std::string::npos);
    CHECK(text.find("\n3,0.25,0.1") != std::string::npos);
}
