#include "canprint/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

namespace canprint {

DiscretizedMatrix discretize(const std::vector<std::vector<double>>& columns, int n_bins) {
    if (n_bins < 2)
        throw std::invalid_argument("discretize: n_bins must be at least 2");

    DiscretizedMatrix out;
    out.n_bins = n_bins;
    out.columns.reserve(columns.size());
    out.edges.reserve(columns.size());

    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        if (col.empty())
            throw std::invalid_argument("discretize: empty feature column " + std::to_string(c));
        double lo = col[0], hi = col[0];
        for (double v : col) {
            if (!std::isfinite(v))
                throw std::invalid_argument("discretize: non-finite value in feature column " + std::to_string(c));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        bool constant = hi == lo;
        double span_lo = constant ? lo - 0.5 : lo;
        double span_hi = constant ? lo + 0.5 : hi;

        std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
        for (int i = 0; i <= n_bins; ++i)
            edges[static_cast<std::size_t>(i)] =
                span_lo + (span_hi - span_lo) * static_cast<double>(i) / n_bins;

        std::vector<int> labels(col.size());
        if (!constant) {
            double scale = static_cast<double>(n_bins) / (hi - lo);
            for (std::size_t i = 0; i < col.size(); ++i) {
                int b = static_cast<int>((col[i] - lo) * scale);
                labels[i] = std::min(b, n_bins - 1);
            }
        }
        out.columns.push_back(std::move(labels));
        out.edges.push_back(std::move(edges));
    }
    return out;
}

namespace {

double plugin_mi(std::span<const int> x, std::span<const int> y) {
    const std::size_t n = x.size();
    std::map<std::pair<int, int>, std::uint64_t> joint;
    std::map<int, std::uint64_t> mx, my;
    for (std::size_t i = 0; i < n; ++i) {
        ++joint[{x[i], y[i]}];
        ++mx[x[i]];
        ++my[y[i]];
    }
    const double total = static_cast<double>(n);
    double mi = 0.0;
    for (const auto& [cell, c_xy] : joint) {
        // c_xy * n and c_x * c_y are exact in double for any dataset that
        // fits in memory, so independent constructions come out exactly 0.
        double ratio = static_cast<double>(c_xy * n) /
                       (static_cast<double>(mx[cell.first]) * static_cast<double>(my[cell.second]));
        mi += (static_cast<double>(c_xy) / total) * std::log2(ratio);
    }
    return mi;
}

} // namespace

double mutual_information(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("mutual_information: label vectors differ in length");
    if (x.empty())
        throw std::invalid_argument("mutual_information: empty label vectors");
    return plugin_mi(x, y);
}

double entropy(std::span<const int> x) {
    if (x.empty())
        throw std::invalid_argument("entropy: empty label vector");
    std::map<int, std::uint64_t> counts;
    for (int v : x) ++counts[v];
    const double total = static_cast<double>(x.size());
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

RankingResult jmi_rank(const DiscretizedMatrix& features, std::span<const int> labels, int k) {
    const int f_count = static_cast<int>(features.columns.size());
    if (k < 1 || k > f_count)
        throw std::invalid_argument("jmi_rank: k must be in [1, feature count]");
    for (const auto& col : features.columns)
        if (col.size() != labels.size())
            throw std::invalid_argument("jmi_rank: labels length does not match feature rows");

    const std::size_t rows = labels.size();
    RankingResult result;
    result.n_bins = features.n_bins;

    std::vector<bool> selected(static_cast<std::size_t>(f_count), false);

    // Step 1: maximum relevance.
    {
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < f_count; ++f) {
            double s = plugin_mi(features.columns[static_cast<std::size_t>(f)], labels);
            if (s > best_score) {
                best_score = s;
                best = f;
            }
        }
        selected[static_cast<std::size_t>(best)] = true;
        result.order.push_back(best);
        result.scores.push_back(best_score);
    }

    // Later steps: accumulated joint MI with each already-selected feature.
    std::vector<double> acc(static_cast<std::size_t>(f_count), 0.0);
    std::vector<int> pair_labels(rows);
    while (static_cast<int>(result.order.size()) < k) {
        int last = result.order.back();
        const auto& last_col = features.columns[static_cast<std::size_t>(last)];
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < f_count; ++f) {
            if (selected[static_cast<std::size_t>(f)]) continue;
            const auto& col = features.columns[static_cast<std::size_t>(f)];
            for (std::size_t i = 0; i < rows; ++i)
                pair_labels[i] = col[i] * features.n_bins + last_col[i];
            acc[static_cast<std::size_t>(f)] += plugin_mi(pair_labels, labels);
            if (acc[static_cast<std::size_t>(f)] > best_score) {
                best_score = acc[static_cast<std::size_t>(f)];
                best = f;
            }
        }
        selected[static_cast<std::size_t>(best)] = true;
        result.order.push_back(best);
        result.scores.push_back(best_score);
    }
    return result;
}

} // namespace canprint
