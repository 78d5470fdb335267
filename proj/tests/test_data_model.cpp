#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ilh/affinity.hpp"
#include "ilh/synth.hpp"
#include "ilh/types.hpp"

using namespace ilh;

TEST_CASE("feature matrix layout and gathers") {
    FeatureMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = static_cast<float>(10 * i + j);

    CHECK(m.n_points() == 3);
    CHECK(m.dim() == 3);
    CHECK(m.row(1)[2] == 12.0f);

    const std::int32_t rows[] = {2, 0};
    auto g = m.gather_rows(rows);
    REQUIRE(g.n_points() == 2);
    CHECK(g(0, 0) == 20.0f);
    CHECK(g(1, 2) == 2.0f);

    const std::int32_t cols[] = {1, 2};
    auto gc = m.gather_cols(cols);
    REQUIRE(gc.dim() == 2);
    CHECK(gc(0, 0) == 1.0f);
    CHECK(gc(2, 1) == 22.0f);

    auto gb = m.gather(rows, cols);
    REQUIRE(gb.n_points() == 2);
    REQUIRE(gb.dim() == 2);
    CHECK(gb(0, 0) == 21.0f);
    CHECK(gb(1, 1) == 2.0f);
}

TEST_CASE("code matrix pack round trip") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t b : {1u, 5u, 8u, 9u, 64u, 67u}) {
        CodeMatrix codes(6, b);
        CHECK(codes.row_bytes() == (b + 7) / 8);
        std::vector<int> ref(6 * b);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < b; ++j) {
                ref[i * b + j] = coin(rng) ? +1 : -1;
                codes.set(i, j, ref[i * b + j]);
            }
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < b; ++j) CHECK(codes.get(i, j) == ref[i * b + j]);
    }
}

TEST_CASE("code matrix padding bits stay zero") {
    CodeMatrix codes(2, 5);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 5; ++j) codes.set(i, j, +1);
    REQUIRE(codes.row_bytes() == 1);
    // 5 ones LSB-first, top 3 bits padding.
    CHECK(codes.data()[0] == 0b00011111);
    CHECK(codes.data()[1] == 0b00011111);

    codes.set(0, 1, -1);
    codes.set(0, 1, +1);
    codes.set(0, 3, -1);
    CHECK(codes.data()[0] == 0b00010111);
}

TEST_CASE("synth dataset geometry and determinism") {
    auto a = synth_dataset(3, 4, 7, 0.1, 42);
    auto b = synth_dataset(3, 4, 7, 0.1, 42);
    CHECK(a.features.data() == b.features.data());
    CHECK(a.labels == b.labels);

    auto c = synth_dataset(3, 4, 7, 0.1, 43);
    CHECK(a.features.data() != c.features.data());

    // Sizes as equal as possible, cluster-major labels.
    const LabelVector want = {0, 0, 0, 1, 1, 2, 2};
    CHECK(a.labels == want);

    // Noise-free points sit exactly on the means; first-shell means are unit
    // separated.
    auto pure = synth_dataset(4, 8, 4, 0.0, 1);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < 8; ++k) {
                const double diff =
                    static_cast<double>(pure.features(i, k)) - pure.features(j, k);
                d2 += diff * diff;
            }
            CHECK(std::sqrt(d2) == Catch::Approx(1.0).margin(1e-6));
        }

    CHECK_THROWS(synth_dataset(1, 4, 10, 0.1, 0));
    CHECK_THROWS(synth_dataset(3, 4, 2, 0.1, 0));
    CHECK_THROWS(synth_dataset(3, 0, 10, 0.1, 0));
    CHECK_THROWS(synth_dataset(3, 4, 10, -0.5, 0));
}

namespace {

std::map<std::pair<int, int>, int> pair_map(const AffinitySet& aff) {
    std::map<std::pair<int, int>, int> out;
    for (const auto& p : aff.pairs) {
        auto [lo, hi] = std::minmax(p.n, p.m);
        auto [it, fresh] = out.emplace(std::make_pair(lo, hi), p.y);
        REQUIRE(fresh);  // unordered pairs appear once
    }
    return out;
}

}  // namespace

TEST_CASE("supervised affinity builder") {
    // 3 classes of sizes 5, 5, 2 on distinct points.
    FeatureMatrix feats(12, 2);
    LabelVector labels(12);
    for (std::size_t i = 0; i < 12; ++i) {
        feats(i, 0) = static_cast<float>(i);
        labels[i] = i < 5 ? 0 : (i < 10 ? 1 : 2);
    }

    const std::size_t s_pos = 3, s_neg = 4;
    auto res = build_affinities_supervised(feats, labels, s_pos, s_neg, 99);
    CHECK(res.conflict_pairs == 0);

    auto mp = pair_map(res.affinities);
    std::vector<int> pos_deg(12, 0), neg_deg(12, 0);
    for (const auto& [key, y] : mp) {
        CHECK(key.first != key.second);
        const bool same = labels[static_cast<std::size_t>(key.first)] ==
                          labels[static_cast<std::size_t>(key.second)];
        CHECK(y == (same ? +1 : -1));
        auto& deg = same ? pos_deg : neg_deg;
        ++deg[static_cast<std::size_t>(key.first)];
        ++deg[static_cast<std::size_t>(key.second)];
    }
    // Each point's own draws survive dedup as incident pairs, so the incident
    // degree is at least the per-point quota.
    for (std::size_t i = 0; i < 12; ++i) {
        const int same = i < 10 ? 4 : 1;
        const int other = static_cast<int>(12 - (i < 10 ? 5 : 2));
        CHECK(pos_deg[i] >= std::min<int>(static_cast<int>(s_pos), same));
        CHECK(neg_deg[i] >= std::min<int>(static_cast<int>(s_neg), other));
    }

    auto res2 = build_affinities_supervised(feats, labels, s_pos, s_neg, 99);
    REQUIRE(res2.affinities.size() == res.affinities.size());
    for (std::size_t i = 0; i < res.affinities.size(); ++i) {
        CHECK(res.affinities.pairs[i].n == res2.affinities.pairs[i].n);
        CHECK(res.affinities.pairs[i].m == res2.affinities.pairs[i].m);
        CHECK(res.affinities.pairs[i].y == res2.affinities.pairs[i].y);
    }

    CHECK_THROWS(build_affinities_supervised(feats, labels, 0, 1, 0));
    LabelVector one_class(12, 0);
    CHECK_THROWS(build_affinities_supervised(feats, one_class, 1, 1, 0));
    LabelVector short_labels(5, 0);
    CHECK_THROWS(build_affinities_supervised(feats, short_labels, 1, 1, 0));
}

TEST_CASE("unsupervised affinity builder") {
    // Line 0, 3, 3.5, 3.8 with k_pos=1 and s_neg=2: every draw is forced, so
    // the whole output is a hand oracle. Nearest neighbors: 0->1, 1->2, 2->3,
    // 3->2; each point must then take both remaining non-neighbors as
    // negatives.
    FeatureMatrix feats(4, 1);
    feats(0, 0) = 0.0f;
    feats(1, 0) = 3.0f;
    feats(2, 0) = 3.5f;
    feats(3, 0) = 3.8f;

    auto res = build_affinities_unsupervised(feats, 1, 2, 5);
    auto mp = pair_map(res.affinities);

    REQUIRE(mp.size() == 6);
    CHECK(mp[{0, 1}] == +1);
    CHECK(mp[{1, 2}] == +1);
    CHECK(mp[{2, 3}] == +1);
    CHECK(mp[{0, 2}] == -1);
    CHECK(mp[{0, 3}] == -1);
    CHECK(mp[{1, 3}] == -1);

    // Point 1's negative draw of 0 clashes with the earlier (0,1,+1), and
    // point 2's negative draw of 1 clashes with (1,2,+1): first writer wins,
    // both clashes counted.
    CHECK(res.conflict_pairs == 2);

    auto res2 = build_affinities_unsupervised(feats, 1, 2, 99);
    CHECK(res2.affinities.size() == res.affinities.size());

    CHECK_THROWS(build_affinities_unsupervised(feats, 0, 1, 0));
    CHECK_THROWS(build_affinities_unsupervised(feats, 2, 2, 0));
}

TEST_CASE("affinity restriction reindexes") {
    AffinitySet aff;
    aff.pairs.push_back({0, 4, +1});
    aff.pairs.push_back({2, 4, -1});
    aff.pairs.push_back({1, 3, +1});

    const std::int32_t subset[] = {4, 0, 2};
    auto r = restrict_affinities(aff, subset, 5);
    REQUIRE(r.size() == 2);
    CHECK(r.pairs[0].n == 1);  // 0 -> slot 1
    CHECK(r.pairs[0].m == 0);  // 4 -> slot 0
    CHECK(r.pairs[0].y == +1);
    CHECK(r.pairs[1].n == 2);  // 2 -> slot 2
    CHECK(r.pairs[1].m == 0);
    CHECK(r.pairs[1].y == -1);

    const std::int32_t none[] = {3};
    CHECK(restrict_affinities(aff, none, 5).size() == 0);
}
