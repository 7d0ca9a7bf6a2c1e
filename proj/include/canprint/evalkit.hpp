#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canprint/mlp.hpp"

namespace canprint {

// Prediction-vs-target count grid. Rows are the predicted class, columns the
// target class (the transpose of some conventions; kept this way throughout).
struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::vector<std::int64_t>> counts;  // counts[pred][target]

    std::int64_t total() const;
    double accuracy() const;  // trace / total
    // diag / row sum and diag / column sum; 0 by convention when the sum is 0,
    // with the affected class flagged.
    std::vector<double> precision() const;
    std::vector<double> recall() const;
    std::vector<bool> empty_prediction_rows() const;
    std::vector<bool> empty_target_columns() const;

    bool operator==(const ConfusionMatrix&) const = default;
};

struct SplitResult {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Seeded random partition. Stratified mode allocates round(n * train_frac)
// rows per class (clamped so both sides keep at least one row); every class
// needs at least 2 rows. Non-stratified mode shuffles globally.
SplitResult split(const LabeledDataset& data, double train_frac, std::uint64_t seed,
                  bool stratified = true);

ConfusionMatrix evaluate(const MlpModel& model, const LabeledDataset& test);

enum class Verdict { MATCH, MISMATCH, UNKNOWN };

const char* to_string(Verdict v);

struct IdentityVerdict {
    std::string claimed_class;
    std::string predicted_class;
    double confidence = 0.0;
    double threshold = 0.0;
    Verdict verdict = Verdict::UNKNOWN;
};

// Flags a record whose fingerprint disagrees with the claimed transmitter:
// UNKNOWN when confidence is below the threshold, MISMATCH when confident and
// the predicted class differs from the claim, MATCH otherwise.
IdentityVerdict identify(const MlpModel& model, const Eigen::VectorXd& features,
                         const std::string& claimed_class, double threshold = 0.9);

enum class ReportFormat { Text, Csv, Json };

// Text mirrors the count + percent-of-total cell style; CSV carries the raw
// count grid and round-trips through parse_report_csv; JSON carries counts
// plus the derived statistics.
std::string render_report(const ConfusionMatrix& cm, ReportFormat format);
ConfusionMatrix parse_report_csv(const std::string& csv);

} // namespace canprint
