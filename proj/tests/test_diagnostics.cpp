#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ilh/diagnostics.hpp"
#include "ilh/retrieval.hpp"

using namespace ilh;

TEST_CASE("code_gram by hand") {
    CodeMatrix codes(4, 3);
    const int col0[] = {+1, +1, -1, -1};
    const int col1[] = {+1, -1, +1, -1};  // orthogonal to col0
    for (std::size_t i = 0; i < 4; ++i) {
        codes.set(i, 0, col0[i]);
        codes.set(i, 1, col1[i]);
        codes.set(i, 2, -col0[i]);  // anti-aligned copy
    }
    const auto c = code_gram(codes);
    REQUIRE(c.rows == 3);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(1, 1) == 1.0);
    CHECK(c(2, 2) == 1.0);
    CHECK(c(0, 1) == 0.0);
    CHECK(c(1, 0) == 0.0);
    CHECK(c(0, 2) == -1.0);
    CHECK(c(1, 2) == 0.0);

    CodeMatrix empty(0, 2);
    CHECK_THROWS(code_gram(empty));
}

TEST_CASE("weight_gram normalizes rows") {
    Matrix w(2, 2);
    w(0, 0) = 2.0;  // (2,0)
    w(1, 1) = 3.0;  // (0,3)
    const auto c = weight_gram(w);
    CHECK(c(0, 0) == Catch::Approx(1.0));
    CHECK(c(1, 1) == Catch::Approx(1.0));
    CHECK(c(0, 1) == Catch::Approx(0.0));

    Matrix scaled(2, 2);
    scaled(0, 0) = 8.0;  // same directions, different lengths
    scaled(1, 1) = 0.5;
    const auto c2 = weight_gram(scaled);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(c2(i, j) == Catch::Approx(c(i, j)));

    Matrix with_zero(2, 2);
    with_zero(0, 0) = 1.0;
    CHECK_THROWS(weight_gram(with_zero));
}

TEST_CASE("ortho_measure anchors and sign invariance") {
    Matrix ident(3, 3);
    for (std::size_t i = 0; i < 3; ++i) ident(i, i) = 1.0;
    CHECK(ortho_measure(ident) == 0.0);

    Matrix worst(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) worst(i, j) = (i == j) ? 1.0 : ((i + j) % 2 ? -1.0 : 1.0);
    CHECK(ortho_measure(worst) == Catch::Approx(1.0));

    // Conjugating with a sign diagonal flips off-diagonal signs only, so the
    // measure cannot move.
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> coin(0, 1);
    CodeMatrix codes(16, 6);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 6; ++j) codes.set(i, j, coin(rng) ? +1 : -1);
    const auto base = code_gram(codes);
    const double want = ortho_measure(base);
    for (int trial = 0; trial < 100; ++trial) {
        double s[6];
        for (auto& v : s) v = coin(rng) ? 1.0 : -1.0;
        Matrix flipped(6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) flipped(i, j) = s[i] * base(i, j) * s[j];
        CHECK(ortho_measure(flipped) == Catch::Approx(want).margin(1e-12));
    }

    Matrix rect(2, 3);
    CHECK_THROWS(ortho_measure(rect));
    Matrix single(1, 1);
    single(0, 0) = 1.0;
    CHECK_THROWS(ortho_measure(single));
}

TEST_CASE("random controls have the null mean and variance") {
    const std::size_t d = 128, n = 10000;
    const auto bin = random_control(d, n, ControlKind::binary, 7);
    REQUIRE(bin.values.size() == n);
    // mean: 3 sigma with sigma^2 = (1/d)/n; variance: 3 standard errors with
    // Var(z^2) = (2d-2)/d^3 for the +-1 dot model.
    CHECK(std::fabs(bin.mean) <= 3.0 * std::sqrt(1.0 / (static_cast<double>(d) * n)));
    const double se_var =
        std::sqrt((2.0 * d - 2.0) / (static_cast<double>(d) * d * d) / static_cast<double>(n));
    CHECK(std::fabs(bin.variance - 1.0 / static_cast<double>(d)) <= 3.0 * se_var);
    for (auto v : bin.values) CHECK(std::fabs(v) <= 1.0);

    const auto real = random_control(16, 4000, ControlKind::real_unit, 11);
    for (auto v : real.values) CHECK(std::fabs(v) <= 1.0 + 1e-12);
    CHECK(std::fabs(real.mean) <= 0.012);  // 3 sigma at var 1/16
    CHECK(std::fabs(real.variance - 1.0 / 16.0) <= 0.004);

    CHECK_THROWS(random_control(0, 10, ControlKind::binary, 1));
    const auto none = random_control(4, 0, ControlKind::binary, 1);
    CHECK(none.values.empty());
    CHECK(none.mean == 0.0);
    CHECK(none.variance == 0.0);
}

TEST_CASE("histogram_unit bins, clamps, and conserves counts") {
    const std::vector<double> samples = {-1.0, -0.999, 0.0, 0.999, 1.0, 2.0, -2.0};
    const auto h = histogram_unit(samples);
    REQUIRE(h.edges.size() == 42);
    REQUIRE(h.counts.size() == 41);
    CHECK(h.edges.front() == Catch::Approx(-1.0));
    CHECK(h.edges.back() == Catch::Approx(1.0));
    CHECK(h.edges[1] == Catch::Approx(-1.0 + 2.0 / 41.0));

    CHECK(h.counts[0] == 3);   // -1, -0.999, clamped -2
    CHECK(h.counts[20] == 1);  // 0 lands mid-bin
    CHECK(h.counts[40] == 3);  // 0.999, 1, clamped 2
    std::int64_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == static_cast<std::int64_t>(samples.size()));

    const auto h2 = histogram_unit(std::vector<double>{-0.5, 0.5, -1.0}, 2);
    REQUIRE(h2.counts.size() == 2);
    CHECK(h2.counts[0] == 2);
    CHECK(h2.counts[1] == 1);
}

TEST_CASE("weight_rows embeds feature subsets and skips kernels") {
    HashEnsemble e;
    e.dim = 3;
    e.bits.resize(2);
    LinearHash h0;
    h0.weights = {1.0, 2.0};
    e.bits[0].hash = h0;
    e.bits[0].feature_subset = {0, 2};
    LinearHash h1;
    h1.weights = {3.0, 4.0, 5.0};
    e.bits[1].hash = h1;
    e.bits[1].feature_subset = {0, 1, 2};

    const auto w = weight_rows(e);
    REQUIRE(w.has_value());
    REQUIRE(w->rows == 2);
    REQUIRE(w->cols == 3);
    CHECK((*w)(0, 0) == 1.0);
    CHECK((*w)(0, 1) == 0.0);
    CHECK((*w)(0, 2) == 2.0);
    CHECK((*w)(1, 0) == 3.0);
    CHECK((*w)(1, 1) == 4.0);
    CHECK((*w)(1, 2) == 5.0);

    HashEnsemble k;
    k.opts.family = HashFamily::kernel;
    k.dim = 3;
    CHECK_FALSE(weight_rows(k).has_value());
}

TEST_CASE("ortho report ties the pieces together") {
    HashEnsemble e;
    e.dim = 2;
    e.bits.resize(3);
    const double ws[3][2] = {{1.0, 0.0}, {0.6, 0.8}, {-0.3, 1.1}};
    for (std::size_t i = 0; i < 3; ++i) {
        LinearHash h;
        h.weights = {ws[i][0], ws[i][1]};
        e.bits[i].hash = h;
        e.bits[i].feature_subset = {0, 1};
    }

    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FeatureMatrix data(20, 2);
    for (auto& v : data.data()) v = static_cast<float>(gauss(rng));
    const auto codes = encode(e, data);

    const auto rep = make_ortho_report(e, codes, 5);
    const auto want_codes = code_gram(codes);
    REQUIRE(rep.c_codes.rows == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(rep.c_codes(i, j) == want_codes(i, j));
    CHECK(rep.measure_codes == Catch::Approx(ortho_measure(want_codes)));
    CHECK(rep.measure_weights == Catch::Approx(ortho_measure(rep.c_weights)));

    std::int64_t sum = 0;
    for (auto c : rep.hist_codes.counts) sum += c;
    CHECK(sum == 3);  // b(b-1)/2 off-diagonal pairs
    sum = 0;
    for (auto c : rep.control_codes.counts) sum += c;
    CHECK(sum == 3);
    sum = 0;
    for (auto c : rep.control_weights.counts) sum += c;
    CHECK(sum == 3);

    const auto [cz, cw] = ortho_matrices(codes, *weight_rows(e));
    CHECK(cz(0, 1) == rep.c_codes(0, 1));
    CHECK(cw(0, 1) == rep.c_weights(0, 1));
    Matrix wrong(2, 2);
    wrong(0, 0) = wrong(1, 1) = 1.0;
    CHECK_THROWS(ortho_matrices(codes, wrong));

    // Kernel ensembles report codes only.
    HashEnsemble k;
    k.opts.family = HashFamily::kernel;
    k.dim = 2;
    k.bits.resize(2);
    for (std::size_t i = 0; i < 2; ++i) {
        KernelHash kh;
        kh.centers = FeatureMatrix(2, 2);
        kh.centers(0, 0) = 1.0f;
        kh.centers(1, 1) = i ? -1.0f : 1.0f;
        kh.sigma = 1.0;
        kh.weights = {0.7, -0.4};
        kh.bias = i ? 0.2 : -0.1;
        k.bits[i].hash = kh;
        k.bits[i].feature_subset = {0, 1};
    }
    const auto kcodes = encode(k, data);
    const auto krep = make_ortho_report(k, kcodes, 5);
    CHECK(krep.c_weights.rows == 0);
    CHECK(krep.measure_weights == 0.0);
    CHECK(krep.c_codes.rows == 2);
}
