#include "cosmicbell/chsh.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cosmicbell;
using namespace cosmicbell::chsh;

namespace {

// Two-sided pooled two-proportion z test, written out directly.
double two_prop_p(double x1, double n1, double x2, double n2) {
    const double p = (x1 + x2) / (n1 + n2);
    const double z = (x1 / n1 - x2 / n2) / std::sqrt(p * (1 - p) * (1 / n1 + 1 / n2));
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

// E_ij computed from raw counts, S = E11 + E12 + E21 - E22 (sign-free magnitude).
double s_from_counts(const CoincidenceCounts& c) {
    double e[4];
    for (std::size_t k = 0; k < 4; ++k) {
        const double t = static_cast<double>(c.cell_total(k));
        e[k] = (static_cast<double>(c.equal(k)) - static_cast<double>(c.unequal(k))) / t;
    }
    return std::fabs(e[0] + e[1] + e[2] - e[3]);
}

}  // namespace

TEST(Chsh, PublishedPair1) {
    const auto r = correlations(fixtures::pair1_counts());
    EXPECT_NEAR(r.C, 0.3229, 1e-4);
    EXPECT_NEAR(r.S, 2.6457, 1e-4);
    EXPECT_NEAR(r.V, 0.935, 1e-3);
}

TEST(Chsh, PublishedPair2) {
    const auto r = correlations(fixtures::pair2_counts());
    EXPECT_NEAR(r.C, 0.3140, 1e-4);
    EXPECT_NEAR(r.S, 2.6281, 1e-4);
    EXPECT_NEAR(r.V, 0.929, 1e-3);
}

TEST(Chsh, SMatchesDirectCorrelators) {
    for (const auto& c : {fixtures::pair1_counts(), fixtures::pair2_counts()})
        EXPECT_NEAR(correlations(c).S, s_from_counts(c), 1e-12);
}

TEST(Chsh, FlippingOneSideKeepsMagnitude) {
    const auto c = fixtures::pair1_counts();
    const auto f = c.flip_a();
    EXPECT_NEAR(s_from_counts(f), s_from_counts(c), 1e-12);
    EXPECT_EQ(f.flip_a(), c);
    EXPECT_EQ(c.total(), f.total());
}

TEST(Chsh, WinsDefinition) {
    const auto c = fixtures::pair1_counts();
    const auto w = c.wins();
    EXPECT_EQ(w[0], c.unequal(0));
    EXPECT_EQ(w[1], c.unequal(1));
    EXPECT_EQ(w[2], c.unequal(2));
    EXPECT_EQ(w[3], c.equal(3));
}

TEST(Chsh, IndependencePublished) {
    const auto s1 = settings_independence(fixtures::pair1_counts());
    const auto s2 = settings_independence(fixtures::pair2_counts());
    EXPECT_NEAR(s1.chi2, 0.1504, 1e-3);
    EXPECT_NEAR(s1.p_value, 0.698, 1e-3);
    EXPECT_NEAR(s2.chi2, 2.405, 1e-2);
    EXPECT_NEAR(s2.p_value, 0.121, 1e-3);
    EXPECT_EQ(s1.dof, 1);
}

TEST(Chsh, IndependenceOfExactProductIsZero) {
    CoincidenceCounts c;
    // margins 0.4/0.6 and 0.3/0.7 with N = 1000: cells 120, 280, 180, 420
    const std::uint64_t cells[4] = {120, 280, 180, 420};
    for (std::size_t k = 0; k < 4; ++k) c.n[k] = {cells[k], 0, 0, 0};
    const auto s = settings_independence(c);
    EXPECT_NEAR(s.chi2, 0.0, 1e-12);
    EXPECT_NEAR(s.p_value, 1.0, 1e-12);
}

TEST(Chsh, NoSignalingMatchesDirectZTest) {
    for (const auto& c : {fixtures::pair1_counts(), fixtures::pair2_counts()}) {
        const auto r = no_signaling(c);
        auto a_plus = [&](std::size_t k) { return static_cast<double>(c.n[k][0] + c.n[k][1]); };
        auto b_plus = [&](std::size_t k) { return static_cast<double>(c.n[k][0] + c.n[k][2]); };
        auto tot = [&](std::size_t k) { return static_cast<double>(c.cell_total(k)); };
        EXPECT_NEAR(r.tests[0].p_value, two_prop_p(a_plus(0), tot(0), a_plus(1), tot(1)), 1e-9);
        EXPECT_NEAR(r.tests[1].p_value, two_prop_p(a_plus(2), tot(2), a_plus(3), tot(3)), 1e-9);
        EXPECT_NEAR(r.tests[2].p_value, two_prop_p(b_plus(0), tot(0), b_plus(2), tot(2)), 1e-9);
        EXPECT_NEAR(r.tests[3].p_value, two_prop_p(b_plus(1), tot(1), b_plus(3), tot(3)), 1e-9);
    }
}

TEST(Chsh, NoSignalingAggregate) {
    const auto r2 = no_signaling(fixtures::pair2_counts());
    EXPECT_NEAR(r2.tests[1].p_value, 0.023, 2e-3);
    EXPECT_NEAR(r2.aggregate_p, 0.170, 5e-3);
}

TEST(Chsh, EmptyCellIsAnError) {
    auto c = fixtures::pair1_counts();
    c.n[0] = {0, 0, 0, 0};
    EXPECT_THROW(correlations(c), DataError);
    EXPECT_THROW(no_signaling(c), DataError);
    EXPECT_THROW(settings_independence(CoincidenceCounts{}), DataError);
}

TEST(Chsh, CsvRoundTripAndErrors) {
    const auto dir = fixtures::scratch_dir("chsh_io");
    const auto c = fixtures::pair2_counts();
    write_counts_csv(dir + "/c.csv", c);
    EXPECT_EQ(read_counts_csv(dir + "/c.csv"), c);
    EXPECT_EQ(parse_counts_csv("1,2,3,4\n5,6,7,8\n9,10,11,12\n13,14,15,16\n").at(2, 2, -1, -1), 16u);
    EXPECT_THROW(parse_counts_csv("1,2,3,4\n"), DataError);
    EXPECT_THROW(parse_counts_csv("1,2,3,4\n5,6,7,8\n9,10,11,12\n13,14,15,-1\n"), DataError);
    EXPECT_THROW(read_counts_csv(dir + "/missing.csv"), DataError);
}

TEST(Chsh, TabulateTrials) {
    const std::vector<events::TrialRecord> t{{0, 0, 1, 1, 1, 1}, {0, 0, 2, 2, -1, 1}, {0, 0, 2, 2, -1, 1}};
    const auto c = tabulate(t);
    EXPECT_EQ(c.at(1, 1, 1, 1), 1u);
    EXPECT_EQ(c.at(2, 2, -1, 1), 2u);
    EXPECT_EQ(c.total(), 3u);
    EXPECT_THROW(tabulate(std::vector<events::TrialRecord>{{0, 0, 3, 1, 1, 1}}), DataError);
}

TEST(Chsh, LocalStrategiesRespectBound) {
    const auto strategies = oracles::all_local_strategies();
    ASSERT_EQ(strategies.size(), 16u);
    const std::size_t n = 200000;
    for (std::size_t k = 0; k < strategies.size(); ++k) {
        const auto c = oracles::local_counts({strategies[k]}, {1.0}, n, 100 + k);
        EXPECT_NEAR(correlations(c).S, 2.0, 1e-12);
        EXPECT_EQ(std::abs(oracles::signed_chsh(strategies[k])), 2);
    }
    // Mixtures of strategies saturating the bound with one sign: S sits at 2, never above 3 sigma.
    for (int trial = 0; trial < 20; ++trial) {
        const int sign = trial % 2 ? 1 : -1;
        const auto w = oracles::saturating_mixture(strategies, sign, 77 + static_cast<std::uint64_t>(trial));
        const auto c = oracles::local_counts(strategies, w, n, 1000 + static_cast<std::uint64_t>(trial));
        double var = 0;
        for (std::size_t cell = 0; cell < 4; ++cell) {
            const double t = static_cast<double>(c.cell_total(cell));
            const double e = (static_cast<double>(c.equal(cell)) - static_cast<double>(c.unequal(cell))) / t;
            var += (1 - e * e) / t;
        }
        EXPECT_LE(correlations(c).S, 2.0 + 3 * std::sqrt(var));
    }
}
