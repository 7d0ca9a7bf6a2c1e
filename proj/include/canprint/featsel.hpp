#pragma once

#include <span>
#include <vector>

namespace canprint {

// Per-feature equal-width bin labels plus the edges that produced them.
struct DiscretizedMatrix {
    std::vector<std::vector<int>> columns;     // one label vector per feature
    int n_bins = 0;
    std::vector<std::vector<double>> edges;    // n_bins + 1 boundaries per feature
};

struct RankingResult {
    std::vector<int> order;      // selected feature indices, in selection order
    std::vector<double> scores;  // greedy criterion value at each step
    int n_bins = 0;
};

// Equal-width binning per column over [min, max]; the final bin is
// right-closed. Constant columns map to bin 0 with unit-width placeholder
// edges. Rejects non-finite input.
DiscretizedMatrix discretize(const std::vector<std::vector<double>>& columns, int n_bins);

// Plug-in estimate of I(X;Y) in bits over observed cells.
double mutual_information(std::span<const int> x, std::span<const int> y);

// Plug-in entropy H(X) in bits; the I(X;X) reference point.
double entropy(std::span<const int> x);

// Greedy joint-mutual-information forward selection: the first pick maximizes
// I(X_f; Y), later picks maximize sum over selected j of I((X_f, X_j); Y)
// where the pair is encoded as x_f * n_bins + x_j. Ties break toward the
// lowest feature index.
RankingResult jmi_rank(const DiscretizedMatrix& features, std::span<const int> labels, int k);

} // namespace canprint
