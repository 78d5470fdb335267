#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "ilh/energy.hpp"

using namespace ilh;

TEST_CASE("quadratic reduction reproduces the literal losses") {
    const int assignments[4][2] = {{+1, +1}, {-1, -1}, {+1, -1}, {-1, +1}};

    for (double y : {1.0, -1.0}) {
        const auto ksh = pairwise_coefficient(LossKind::ksh, y);
        const auto lap = pairwise_coefficient(LossKind::lap, y);
        for (const auto& zz : assignments) {
            CHECK(ksh.a * zz[0] * zz[1] + ksh.c ==
                  Catch::Approx(literal_loss(LossKind::ksh, y, zz[0], zz[1])).margin(1e-12));
            CHECK(lap.a * zz[0] * zz[1] + lap.c ==
                  Catch::Approx(literal_loss(LossKind::lap, y, zz[0], zz[1])).margin(1e-12));
        }
        // Shared coupling: both reduce to -2y on the quadratic term.
        CHECK(ksh.a == -2.0 * y);
        CHECK(lap.a == -2.0 * y);
        CHECK(ksh.a == lap.a);
    }

    for (double y : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto bre = pairwise_coefficient(LossKind::bre, y);
        for (const auto& zz : assignments)
            CHECK(bre.a * zz[0] * zz[1] + bre.c ==
                  Catch::Approx(literal_loss(LossKind::bre, y, zz[0], zz[1])).margin(1e-12));
    }

    CHECK_THROWS(pairwise_coefficient(LossKind::ksh, 0.5));
    CHECK_THROWS(pairwise_coefficient(LossKind::lap, 0.0));
    CHECK_THROWS(pairwise_coefficient(LossKind::bre, 1.5));
    CHECK_THROWS(pairwise_coefficient(LossKind::bre, -0.1));
}

TEST_CASE("bre target maps similarity to scaled distance") {
    CHECK(bre_target(+1) == 0.0);
    CHECK(bre_target(-1) == 1.0);
}

TEST_CASE("energy builder accumulates and dedups") {
    EnergyBuilder b(4);
    b.add_coupling(0, 1, -2.0);
    b.add_coupling(1, 0, -1.0);  // same unordered pair
    b.add_coupling(2, 3, 4.0);
    b.add_coupling(2, 3, -4.0);  // cancels to zero, dropped
    b.add_linear(1, 0.5);
    b.add_linear(1, 0.25);
    b.add_constant(3.0);
    auto e = b.take();

    CHECK(e.n_vars == 4);
    REQUIRE(e.couplings.size() == 1);
    CHECK(e.couplings[0].n == 0);
    CHECK(e.couplings[0].m == 1);
    CHECK(e.couplings[0].a == -3.0);
    CHECK(e.linear[1] == 0.75);
    CHECK(e.constant == 3.0);

    EnergyBuilder bad(2);
    CHECK_THROWS(bad.add_coupling(0, 0, 1.0));
    CHECK_THROWS(bad.add_coupling(0, 2, 1.0));
}

TEST_CASE("build_energy over an affinity set") {
    AffinitySet aff;
    aff.pairs.push_back({0, 1, +1});
    aff.pairs.push_back({1, 2, -1});
    aff.pairs.push_back({0, 1, +1});  // duplicate contribution sums

    auto e = build_energy(aff, LossKind::lap);
    CHECK(e.n_vars == 3);
    REQUIRE(e.couplings.size() == 2);
    // lap: a = -2y, c = 2y. Pair (0,1) twice: -4; (1,2): +2.
    CHECK(e.couplings[0].a == -4.0);
    CHECK(e.couplings[1].a == +2.0);
    CHECK(e.constant == 2.0 + 2.0 - 2.0);
    for (double l : e.linear) CHECK(l == 0.0);

    // BRE consumes the +-1 labels through the distance target.
    auto eb = build_energy(aff, LossKind::bre, 3);
    CHECK(eb.couplings[0].a == 2.0 * -4.0 * (2.0 - 0.0));
    CHECK(eb.couplings[1].a == -4.0 * (2.0 - 1.0));
}

TEST_CASE("energy_eval matches a direct reference") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_int_distribution<int> coin(0, 1);

    for (int trial = 0; trial < 100; ++trial) {
        const std::int32_t n = 8;
        QuadraticEnergy e;
        e.n_vars = n;
        e.linear.resize(n);
        for (auto& l : e.linear) l = coef(rng);
        e.constant = coef(rng);
        for (std::int32_t i = 0; i < n; ++i)
            for (std::int32_t j = i + 1; j < n; ++j)
                if (coin(rng)) e.couplings.push_back({i, j, coef(rng)});

        std::vector<std::int8_t> z(n);
        for (auto& v : z) v = coin(rng) ? +1 : -1;

        double ref = e.constant;
        for (const auto& c : e.couplings)
            ref += c.a * z[static_cast<std::size_t>(c.n)] * z[static_cast<std::size_t>(c.m)];
        for (std::int32_t i = 0; i < n; ++i) ref += e.linear[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
        CHECK(energy_eval(e, z) == Catch::Approx(ref).margin(1e-12));

        // Global flip symmetry holds when linear terms vanish.
        auto e0 = e;
        std::fill(e0.linear.begin(), e0.linear.end(), 0.0);
        auto zf = z;
        for (auto& v : zf) v = static_cast<std::int8_t>(-v);
        CHECK(energy_eval(e0, z) == Catch::Approx(energy_eval(e0, zf)).margin(1e-12));
    }

    QuadraticEnergy e;
    e.n_vars = 3;
    e.linear.resize(3);
    std::vector<std::int8_t> wrong(2, +1);
    CHECK_THROWS(energy_eval(e, wrong));
}

namespace {

// Single-bit hinge loss with margin rho and dissimilar weight lambda; d is the
// Hamming distance between the two bits.
double mlh_single_bit(int zn, int zm, int y, double rho, double lambda) {
    const double d = zn == zm ? 0.0 : 1.0;
    if (y == 1) return std::max(d - rho + 1.0, 0.0);
    return lambda * std::max(rho - d + 1.0, 0.0);
}

}  // namespace

TEST_CASE("single-bit hinge loss is code-dependent for both labels") {
    // Frozen truth table at rho = lambda = 1 over the four code assignments
    // (+,+), (-,-), (+,-), (-,+): the loss tracks the Hamming distance for
    // both label values, so it is NOT constant given y.
    const int assignments[4][2] = {{+1, +1}, {-1, -1}, {+1, -1}, {-1, +1}};
    const double want_sim[4] = {0.0, 0.0, 1.0, 1.0};
    const double want_dis[4] = {2.0, 2.0, 1.0, 1.0};

    for (int i = 0; i < 4; ++i) {
        CHECK(mlh_single_bit(assignments[i][0], assignments[i][1], 1, 1.0, 1.0) == want_sim[i]);
        CHECK(mlh_single_bit(assignments[i][0], assignments[i][1], 0, 1.0, 1.0) == want_dis[i]);
    }

    // Equivalent quadratic: agreeing codes shift the loss by -1/2 (similar)
    // or +lambda (dissimilar) relative to disagreeing ones.
    for (int y : {0, 1}) {
        const double agree = mlh_single_bit(+1, +1, y, 1.0, 1.0);
        const double disagree = mlh_single_bit(+1, -1, y, 1.0, 1.0);
        CHECK(agree != disagree);
    }
}
