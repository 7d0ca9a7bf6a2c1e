#include "canprint/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "canprint/rng.hpp"
#include "json.hpp"

namespace canprint {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (std::int64_t c : row) t += c;
    return t;
}

double ConfusionMatrix::accuracy() const {
    std::int64_t t = total();
    if (t == 0) return 0.0;
    std::int64_t diag = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) diag += counts[i][i];
    return static_cast<double>(diag) / static_cast<double>(t);
}

std::vector<double> ConfusionMatrix::precision() const {
    std::vector<double> out(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::int64_t row = 0;
        for (std::int64_t c : counts[i]) row += c;
        out[i] = row == 0 ? 0.0 : static_cast<double>(counts[i][i]) / static_cast<double>(row);
    }
    return out;
}

std::vector<double> ConfusionMatrix::recall() const {
    std::vector<double> out(counts.size(), 0.0);
    for (std::size_t j = 0; j < counts.size(); ++j) {
        std::int64_t col = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) col += counts[i][j];
        out[j] = col == 0 ? 0.0 : static_cast<double>(counts[j][j]) / static_cast<double>(col);
    }
    return out;
}

std::vector<bool> ConfusionMatrix::empty_prediction_rows() const {
    std::vector<bool> out(counts.size(), false);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::int64_t row = 0;
        for (std::int64_t c : counts[i]) row += c;
        out[i] = row == 0;
    }
    return out;
}

std::vector<bool> ConfusionMatrix::empty_target_columns() const {
    std::vector<bool> out(counts.size(), false);
    for (std::size_t j = 0; j < counts.size(); ++j) {
        std::int64_t col = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) col += counts[i][j];
        out[j] = col == 0;
    }
    return out;
}

SplitResult split(const LabeledDataset& data, double train_frac, std::uint64_t seed,
                  bool stratified) {
    validate(data);
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw std::invalid_argument("split: train_frac must be in (0, 1)");

    const std::size_t rows = data.y.size();
    std::vector<std::size_t> train_idx, test_idx;

    auto shuffle = [](std::vector<std::size_t>& v, Rng& rng) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(v[i - 1], v[j]);
        }
    };
    auto take = [&](std::vector<std::size_t>& pool, Rng& rng) {
        shuffle(pool, rng);
        std::size_t n_train = static_cast<std::size_t>(std::llround(
            static_cast<double>(pool.size()) * train_frac));
        n_train = std::clamp<std::size_t>(n_train, 1, pool.size() - 1);
        train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_idx.insert(test_idx.end(), pool.begin() + static_cast<std::ptrdiff_t>(n_train), pool.end());
    };

    if (stratified) {
        std::map<int, std::vector<std::size_t>> per_class;
        for (std::size_t i = 0; i < rows; ++i) per_class[data.y[i]].push_back(i);
        for (auto& [label, pool] : per_class) {
            if (pool.size() < 2)
                throw std::invalid_argument("split: class " + std::to_string(label) +
                                            " has fewer than 2 rows");
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
            take(pool, rng);
        }
    } else {
        if (rows < 2)
            throw std::invalid_argument("split: need at least 2 rows");
        std::vector<std::size_t> pool(rows);
        for (std::size_t i = 0; i < rows; ++i) pool[i] = i;
        Rng rng(seed);
        take(pool, rng);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto gather = [&](const std::vector<std::size_t>& idx) {
        LabeledDataset out;
        out.class_names = data.class_names;
        out.x.resize(static_cast<Eigen::Index>(idx.size()), data.x.cols());
        out.y.reserve(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(static_cast<Eigen::Index>(idx[i]));
            out.y.push_back(data.y[idx[i]]);
        }
        return out;
    };

    SplitResult result;
    result.train = gather(train_idx);
    result.test = gather(test_idx);
    result.train_indices = std::move(train_idx);
    result.test_indices = std::move(test_idx);
    return result;
}

ConfusionMatrix evaluate(const MlpModel& model, const LabeledDataset& test) {
    validate(test);
    const int n = model.output_size();
    for (int label : test.y)
        if (label >= n)
            throw std::invalid_argument("evaluate: label outside model output range");

    ConfusionMatrix cm;
    cm.class_names = model.class_names;
    if (cm.class_names.empty())
        for (int i = 0; i < n; ++i) cm.class_names.push_back("class" + std::to_string(i));
    cm.counts.assign(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
    for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
        auto [pred, prob] = predict(model, test.x.row(i).transpose());
        (void)prob;
        int target = test.y[static_cast<std::size_t>(i)];
        ++cm.counts[static_cast<std::size_t>(pred)][static_cast<std::size_t>(target)];
    }
    return cm;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::MATCH: return "MATCH";
        case Verdict::MISMATCH: return "MISMATCH";
        case Verdict::UNKNOWN: return "UNKNOWN";
    }
    return "UNKNOWN";
}

IdentityVerdict identify(const MlpModel& model, const Eigen::VectorXd& features,
                         const std::string& claimed_class, double threshold) {
    auto it = std::find(model.class_names.begin(), model.class_names.end(), claimed_class);
    if (it == model.class_names.end())
        throw std::invalid_argument("identify: claimed class '" + claimed_class +
                                    "' is not one of the model's classes");
    auto [pred, confidence] = predict(model, features);

    IdentityVerdict v;
    v.claimed_class = claimed_class;
    v.predicted_class = model.class_names[static_cast<std::size_t>(pred)];
    v.confidence = confidence;
    v.threshold = threshold;
    if (confidence < threshold)
        v.verdict = Verdict::UNKNOWN;
    else if (v.predicted_class != claimed_class)
        v.verdict = Verdict::MISMATCH;
    else
        v.verdict = Verdict::MATCH;
    return v;
}

namespace {

std::string percent_cell(std::int64_t count, std::int64_t total) {
    char buf[32];
    double pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
    std::snprintf(buf, sizeof(buf), "%.1f%%", pct);
    return buf;
}

std::string render_text(const ConfusionMatrix& cm) {
    const std::size_t n = cm.counts.size();
    const std::int64_t total = cm.total();
    auto precision = cm.precision();
    auto recall = cm.recall();
    auto empty_rows = cm.empty_prediction_rows();
    auto empty_cols = cm.empty_target_columns();

    std::ostringstream os;
    os << "Confusion matrix (rows = predicted class, columns = target class)\n";
    os << "Total records: " << total << "\n\n";

    std::size_t w = 12;
    for (const auto& name : cm.class_names) w = std::max(w, name.size() + 2);

    auto pad = [&](const std::string& s) {
        std::string out = s;
        if (out.size() < w) out.resize(w, ' ');
        return out;
    };

    os << pad("");
    for (const auto& name : cm.class_names) os << pad(name);
    os << pad("precision") << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        os << pad(cm.class_names[i]);
        for (std::size_t j = 0; j < n; ++j)
            os << pad(std::to_string(cm.counts[i][j]) + " " + percent_cell(cm.counts[i][j], total));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f%%%s", 100.0 * precision[i], empty_rows[i] ? " (n/a)" : "");
        os << buf << "\n";
    }
    os << pad("recall");
    for (std::size_t j = 0; j < n; ++j) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f%%%s", 100.0 * recall[j], empty_cols[j] ? " (n/a)" : "");
        os << pad(buf);
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "accuracy %.1f%%", 100.0 * cm.accuracy());
    os << buf << "\n";
    return os.str();
}

std::string render_csv(const ConfusionMatrix& cm) {
    std::ostringstream os;
    os << "predicted\\target";
    for (const auto& name : cm.class_names) os << "," << name;
    os << "\n";
    for (std::size_t i = 0; i < cm.counts.size(); ++i) {
        os << cm.class_names[i];
        for (std::int64_t c : cm.counts[i]) os << "," << c;
        os << "\n";
    }
    return os.str();
}

std::string render_json(const ConfusionMatrix& cm) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["kind"] = "canprint-report";
    j["orientation"] = "rows=predicted,cols=target";
    j["classes"] = cm.class_names;
    j["counts"] = cm.counts;
    j["precision"] = cm.precision();
    j["recall"] = cm.recall();
    j["accuracy"] = cm.accuracy();
    j["total"] = cm.total();
    return j.dump(2) + "\n";
}

} // namespace

std::string render_report(const ConfusionMatrix& cm, ReportFormat format) {
    switch (format) {
        case ReportFormat::Text: return render_text(cm);
        case ReportFormat::Csv: return render_csv(cm);
        case ReportFormat::Json: return render_json(cm);
    }
    throw std::invalid_argument("render_report: unknown format");
}

ConfusionMatrix parse_report_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("parse_report_csv: empty input");

    auto split_fields = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream fs(s);
        while (std::getline(fs, field, ',')) fields.push_back(field);
        return fields;
    };

    auto header = split_fields(line);
    if (header.empty() || header[0] != "predicted\\target")
        throw std::invalid_argument("parse_report_csv: missing header row");
    ConfusionMatrix cm;
    cm.class_names.assign(header.begin() + 1, header.end());
    const std::size_t n = cm.class_names.size();
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != n + 1)
            throw std::invalid_argument("parse_report_csv: row width mismatch");
        std::vector<std::int64_t> row;
        for (std::size_t j = 1; j < fields.size(); ++j) row.push_back(std::stoll(fields[j]));
        cm.counts.push_back(std::move(row));
    }
    if (cm.counts.size() != n)
        throw std::invalid_argument("parse_report_csv: expected " + std::to_string(n) + " rows");
    return cm;
}

} // namespace canprint
