#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "canprint/featsel.hpp"

using namespace canprint;

TEST_CASE("discretize equal-width binning") {
    SUBCASE("right-closed final bin") {
        DiscretizedMatrix dm = discretize({{0.0, 0.5, 1.0}}, 2);
        CHECK(dm.columns[0] == std::vector<int>{0, 1, 1});
        CHECK(dm.edges[0] == std::vector<double>{0.0, 0.5, 1.0});
    }
    SUBCASE("constant column maps to bin 0") {
        DiscretizedMatrix dm = discretize({{4.0, 4.0, 4.0, 4.0}}, 5);
        CHECK(dm.columns[0] == std::vector<int>{0, 0, 0, 0});
    }
    SUBCASE("labels partition the rows") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> dist(-10.0, 10.0);
        std::vector<double> col(500);
        for (auto& v : col) v = dist(gen);
        DiscretizedMatrix dm = discretize({col}, 10);
        std::map<int, int> hist;
        for (int label : dm.columns[0]) {
            CHECK(label >= 0);
            CHECK(label < 10);
            ++hist[label];
        }
        int total = 0;
        for (auto& [_, c] : hist) total += c;
        CHECK(total == 500);
    }
    SUBCASE("non-finite input rejected") {
        CHECK_THROWS_AS(discretize({{0.0, std::nan("")}}, 4), std::invalid_argument);
        CHECK_THROWS_AS(discretize({{0.0, 1.0}}, 1), std::invalid_argument);
    }
}

TEST_CASE("mutual information of a variable with itself is its entropy") {
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> x(200);
        for (auto& v : x) v = static_cast<int>(gen() % 5);
        CHECK(std::abs(mutual_information(x, x) - entropy(x)) <= 1e-12);
    }
}

TEST_CASE("independent factorial variables have exactly zero MI") {
    std::vector<int> x, y;
    for (int rep = 0; rep < 25; ++rep)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                x.push_back(a);
                y.push_back(b);
            }
    CHECK(mutual_information(x, y) == 0.0);
}

TEST_CASE("identical balanced binaries carry exactly one bit") {
    std::vector<int> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<int>(i % 2);
    CHECK(std::abs(mutual_information(x, x) - 1.0) <= 1e-12);
}

TEST_CASE("MI rejects mismatched lengths") {
    std::vector<int> x{0, 1}, y{0, 1, 0};
    CHECK_THROWS_AS(mutual_information(x, y), std::invalid_argument);
}

TEST_CASE("MI symmetry, nonnegativity and relabeling invariance") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> x(300), y(300);
        for (auto& v : x) v = static_cast<int>(gen() % 4);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = (gen() % 3 == 0) ? x[i] : static_cast<int>(gen() % 4);

        double ixy = mutual_information(x, y);
        double iyx = mutual_information(y, x);
        CHECK(std::abs(ixy - iyx) < 1e-12);
        CHECK(ixy >= -1e-12);

        // bijective relabeling leaves the estimate unchanged
        const int perm[4] = {7, 2, 9, 4};
        std::vector<int> xr(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xr[i] = perm[x[i]];
        CHECK(std::abs(mutual_information(xr, y) - ixy) < 1e-12);
    }
}

namespace {

// All rows of the {0,1}^5 factorial, repeated; Y = X0 xor X1.
DiscretizedMatrix xor_matrix(std::vector<int>& labels_out) {
    std::vector<std::vector<double>> cols(5);
    labels_out.clear();
    for (int rep = 0; rep < 4; ++rep) {
        for (int row = 0; row < 32; ++row) {
            for (int f = 0; f < 5; ++f)
                cols[static_cast<std::size_t>(f)].push_back((row >> f) & 1);
            labels_out.push_back(((row >> 0) & 1) ^ ((row >> 1) & 1));
        }
    }
    return discretize(cols, 2);
}

} // namespace

TEST_CASE("jmi_rank step one is maximum relevance") {
    // feature 1 is the label, feature 0 is factorial noise
    std::vector<std::vector<double>> cols(2);
    std::vector<int> labels;
    for (int rep = 0; rep < 10; ++rep)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                cols[0].push_back(a);
                cols[1].push_back(b);
                labels.push_back(b);
            }
    DiscretizedMatrix dm = discretize(cols, 2);
    RankingResult r1 = jmi_rank(dm, labels, 1);
    CHECK(r1.order == std::vector<int>{1});
    CHECK(r1.scores[0] == doctest::Approx(1.0));

    RankingResult r2 = jmi_rank(dm, labels, 2);
    CHECK(r2.order == std::vector<int>{1, 0});
}

TEST_CASE("jmi_rank recovers the XOR pair, matching exhaustive enumeration") {
    std::vector<int> labels;
    DiscretizedMatrix dm = xor_matrix(labels);

    RankingResult r = jmi_rank(dm, labels, 2);
    std::set<int> top2(r.order.begin(), r.order.end());
    CHECK(top2 == std::set<int>{0, 1});

    // exhaustive check: the pair {0, 1} uniquely maximizes I((Xa, Xb); Y)
    double best = -1.0;
    std::set<int> best_pair;
    for (int a = 0; a < 5; ++a) {
        for (int b = a + 1; b < 5; ++b) {
            std::vector<int> joint(labels.size());
            for (std::size_t i = 0; i < labels.size(); ++i)
                joint[i] = dm.columns[static_cast<std::size_t>(a)][i] * dm.n_bins +
                           dm.columns[static_cast<std::size_t>(b)][i];
            double score = mutual_information(joint, labels);
            if (score > best + 1e-12) {
                best = score;
                best_pair = {a, b};
            }
        }
    }
    CHECK(best_pair == top2);
    CHECK(best == doctest::Approx(1.0));  // the XOR pair determines Y

    // greedy records the step scores it maximized
    REQUIRE(r.scores.size() == 2);
    CHECK(r.scores[0] == doctest::Approx(0.0));  // no single feature is relevant
    CHECK(r.scores[1] == doctest::Approx(1.0));
}

TEST_CASE("jmi_rank is deterministic and rejects bad k") {
    std::vector<int> labels;
    DiscretizedMatrix dm = xor_matrix(labels);
    RankingResult a = jmi_rank(dm, labels, 5);
    RankingResult b = jmi_rank(dm, labels, 5);
    CHECK(a.order == b.order);
    CHECK(a.scores == b.scores);
    // order is a permutation prefix
    std::set<int> unique(a.order.begin(), a.order.end());
    CHECK(unique.size() == a.order.size());

    CHECK_THROWS_AS(jmi_rank(dm, labels, 6), std::invalid_argument);
    CHECK_THROWS_AS(jmi_rank(dm, labels, 0), std::invalid_argument);
}
