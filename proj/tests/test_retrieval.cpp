#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "ilh/affinity.hpp"
#include "ilh/retrieval.hpp"
#include "ilh/synth.hpp"

using namespace ilh;

namespace {

RetrievalResult naive_knn(const CodeMatrix& queries, const CodeMatrix& db, std::size_t k) {
    RetrievalResult res;
    res.k = k;
    res.neighbors.resize(queries.n_points());
    for (std::size_t q = 0; q < queries.n_points(); ++q) {
        std::vector<std::pair<std::int32_t, std::int32_t>> order;  // (distance, id)
        for (std::size_t i = 0; i < db.n_points(); ++i) {
            std::int32_t d = 0;
            for (std::size_t j = 0; j < db.n_bits(); ++j)
                if (queries.get(q, j) != db.get(i, j)) ++d;
            order.push_back({d, static_cast<std::int32_t>(i)});
        }
        std::sort(order.begin(), order.end());
        for (std::size_t r = 0; r < k; ++r)
            res.neighbors[q].push_back({order[r].second, order[r].first});
    }
    return res;
}

}  // namespace

TEST_CASE("encode applies hand-built linear bits") {
    HashEnsemble e;
    e.dim = 2;
    e.bits.resize(3);
    LinearHash h0;
    h0.weights = {1.0, 0.0};
    h0.bias = -1.0;  // sign(x0 - 1)
    e.bits[0].hash = h0;
    e.bits[0].feature_subset = {0, 1};
    LinearHash h1;
    h1.weights = {0.0, 1.0};
    e.bits[1].hash = h1;
    e.bits[1].feature_subset = {0, 1};
    LinearHash h2;  // restricted to feature 1: sign(2 x1 - 1)
    h2.weights = {2.0};
    h2.bias = -1.0;
    e.bits[2].hash = h2;
    e.bits[2].feature_subset = {1};

    FeatureMatrix data(2, 2);
    data(0, 0) = 0.0f;
    data(0, 1) = 5.0f;
    data(1, 0) = 2.0f;
    data(1, 1) = 0.4f;

    const auto codes = encode(e, data);
    CHECK(codes.get(0, 0) == -1);  // 0 - 1 < 0
    CHECK(codes.get(0, 1) == +1);  // 5 > 0
    CHECK(codes.get(0, 2) == +1);  // 2*5 - 1 > 0
    CHECK(codes.get(1, 0) == +1);  // 2 - 1 > 0
    CHECK(codes.get(1, 1) == +1);  // 0.4 > 0; sign(0) would also be +1
    CHECK(codes.get(1, 2) == -1);  // 0.8 - 1 < 0

    FeatureMatrix wrong(2, 3);
    CHECK_THROWS(encode(e, wrong));
}

TEST_CASE("kernel encode matches the per-bit path") {
    const auto synth = synth_dataset(2, 3, 30, 0.25, 19);
    const auto built = build_affinities_supervised(synth.features, synth.labels, 2, 2, 4);

    TrainOptions opts;
    opts.family = HashFamily::kernel;
    opts.kernel.centers = 8;
    opts.kernel.mode = CentersMode::shared;
    opts.diversity.master_seed = 6;

    for (auto mode : {CentersMode::shared, CentersMode::priv}) {
        opts.kernel.mode = mode;
        const auto e = train_ensemble(synth.features, built.affinities, 4, opts);
        const auto codes = encode(e, synth.features);
        std::vector<float> scratch;
        for (std::size_t i = 0; i < 30; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(codes.get(i, j) == predict_bit(e.bits[j], synth.features.row(i), scratch));
    }
}

TEST_CASE("hamming_knn equals the per-bit scan") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coin(0, 1);
    const std::size_t widths[] = {1, 5, 8, 9, 17, 64, 65};

    for (int trial = 0; trial < 14; ++trial) {
        const std::size_t b = widths[static_cast<std::size_t>(trial) % 7];
        const std::size_t n_db = 30 + static_cast<std::size_t>(trial);
        const std::size_t n_q = 5;
        CodeMatrix db(n_db, b), queries(n_q, b);
        for (std::size_t i = 0; i < n_db; ++i)
            for (std::size_t j = 0; j < b; ++j) db.set(i, j, coin(rng) ? +1 : -1);
        for (std::size_t i = 0; i < n_q; ++i)
            for (std::size_t j = 0; j < b; ++j) queries.set(i, j, coin(rng) ? +1 : -1);
        // Duplicate rows force distance ties; order must fall back to the id.
        for (std::size_t j = 0; j < b; ++j) {
            db.set(7, j, db.get(2, j));
            db.set(19, j, db.get(2, j));
        }

        const std::size_t k = 1 + static_cast<std::size_t>(trial) * 2 % n_db;
        const auto got = hamming_knn(queries, db, k);
        const auto want = naive_knn(queries, db, k);
        REQUIRE(got.neighbors.size() == n_q);
        for (std::size_t q = 0; q < n_q; ++q) {
            REQUIRE(got.neighbors[q].size() == k);
            for (std::size_t r = 0; r < k; ++r) {
                CHECK(got.neighbors[q][r].id == want.neighbors[q][r].id);
                CHECK(got.neighbors[q][r].distance == want.neighbors[q][r].distance);
            }
        }
    }

    CodeMatrix a(4, 8), c(4, 16);
    CHECK_THROWS(hamming_knn(a, c, 2));
    CHECK_THROWS(hamming_knn(a, a, 5));
    const auto empty = hamming_knn(a, a, 0);
    REQUIRE(empty.neighbors.size() == 4);
    CHECK(empty.neighbors[0].empty());
}

TEST_CASE("precision and recall by hand") {
    RetrievalResult res;
    res.k = 4;
    res.neighbors = {
        {{1, 0}, {3, 0}, {5, 1}, {8, 2}},  // hits: 1, 5
        {{0, 0}, {2, 1}},                  // relevant set empty; skipped
        {{0, 0}, {7, 3}},                  // hits: 0
    };
    GroundTruth gt;
    gt.relevant = {{1, 2, 5}, {}, {0}};

    const auto m = precision_recall(res, gt);
    CHECK(m.evaluated == 2);
    CHECK(m.skipped_empty == 1);
    CHECK(m.precision[0] == Catch::Approx(0.5));
    CHECK(m.recall[0] == Catch::Approx(2.0 / 3.0));
    CHECK(m.precision[1] == 0.0);
    CHECK(m.recall[1] == 0.0);
    CHECK(m.precision[2] == Catch::Approx(0.5));
    CHECK(m.recall[2] == Catch::Approx(1.0));
    CHECK(m.mean_precision == Catch::Approx(0.5));
    CHECK(m.mean_recall == Catch::Approx((2.0 / 3.0 + 1.0) / 2.0));

    GroundTruth wrong;
    wrong.relevant = {{1}};
    CHECK_THROWS(precision_recall(res, wrong));
}

TEST_CASE("label ground truth lists all same-label points") {
    const LabelVector queries = {1, 2};
    const LabelVector base = {1, 2, 1, 3};
    const auto gt = ground_truth_labels(queries, base);
    REQUIRE(gt.relevant.size() == 2);
    CHECK(gt.relevant[0] == std::vector<std::int32_t>{0, 2});
    CHECK(gt.relevant[1] == std::vector<std::int32_t>{1});
}

TEST_CASE("euclidean ground truth orders by distance then index") {
    FeatureMatrix base(5, 1);
    for (std::size_t i = 0; i < 5; ++i) base(i, 0) = static_cast<float>(i);
    FeatureMatrix query(1, 1);
    query(0, 0) = 2.2f;

    const auto gt = ground_truth_euclidean(query, base, 3);
    CHECK(gt.relevant[0] == std::vector<std::int32_t>{2, 3, 1});

    // Exact ties break toward the lower index.
    FeatureMatrix dup(3, 1);
    dup(0, 0) = 0.0f;
    dup(1, 0) = 4.0f;
    dup(2, 0) = 4.0f;
    FeatureMatrix at4(1, 1);
    at4(0, 0) = 4.0f;
    const auto tie = ground_truth_euclidean(at4, dup, 2);
    CHECK(tie.relevant[0] == std::vector<std::int32_t>{1, 2});

    const auto all = ground_truth_euclidean(at4, dup, 3);
    CHECK(all.relevant[0] == std::vector<std::int32_t>{1, 2, 0});

    CHECK_THROWS(ground_truth_euclidean(at4, dup, 4));
    FeatureMatrix wide(1, 2);
    CHECK_THROWS(ground_truth_euclidean(wide, dup, 1));
}
