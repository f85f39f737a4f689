#include "cosmicbell/errors.hpp"
#include "cosmicbell/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cosmicbell;
using namespace cosmicbell::spectral;

namespace {

// Step filters whose passbands stop `gap` nm short of the split on either side.
FilterChain ideal_chain(double lo, double hi, double split, double gap) {
    FilterChain c;
    c.name = "ideal";
    c.split_nm = split;
    c.beamsplitter = {{lo, split, split + 1e-9, hi}, {0, 0, 1, 1}};
    c.sp1 = {{lo, split - gap, split - gap + 1e-9, hi}, {1, 1, 0, 0}};
    c.lp1 = {{lo, split + gap - 1e-9, split + gap, hi}, {0, 0, 1, 1}};
    c.sp2 = Curve::constant(1, lo, hi);
    c.mirrors = Curve::constant(1, lo, hi);
    c.lens = Curve::constant(1, lo, hi);
    c.qe = Curve::constant(1, lo, hi);
    return c;
}

// Power-law continua standing in for the three quasar spectra.
std::vector<Curve> toy_quasars() {
    return {Curve::tabulate(350, 1000, 1, [](double x) { return 50 * std::pow(x / 600, -1.5); }),
            Curve::tabulate(350, 1000, 1, [](double x) { return 20 * std::pow(x / 600, 0.5); }),
            Curve::tabulate(350, 1000, 1, [](double x) { return 80 * std::pow(x / 600, -0.5); })};
}

}  // namespace

TEST(Spectral, ExtinctionIdentityAndMagnitude) {
    const auto s = Curve::constant(10, 400, 900);
    EXPECT_EQ(apply_extinction(s, 0, illustrative_extinction()).value, s.value);
    const auto one = apply_extinction(s, 1, Curve::constant(1, 400, 900));
    EXPECT_NEAR(one.value[0], 10 * 0.398107, 1e-5);
    EXPECT_THROW(apply_extinction(s, -1, illustrative_extinction()), DomainError);
}

TEST(Spectral, RedBandAtmosphericTransmission) {
    // Mean transmission over the red band at airmass 1.5 (altitude ~42 deg).
    const auto ext = illustrative_extinction();
    const auto flat = Curve::constant(1, 637, 745);
    const auto t = apply_extinction(flat, airmass_of_altitude(41.8), ext);
    double mean = 0;
    int n = 0;
    for (double x = 637; x <= 745; x += 0.5, ++n) mean += t.at(x);
    mean /= n;
    EXPECT_GE(mean, 0.95);
    EXPECT_LE(mean, 0.96);
}

TEST(Spectral, IdealFiltersHaveNoWrongWay) {
    const auto r = band_rates(Curve::constant(1, 400, 900), ideal_chain(400, 900, 650, 10));
    EXPECT_NEAR(r.f_blue_to_red, 0.0, 1e-9);
    EXPECT_NEAR(r.f_red_to_blue, 0.0, 1e-9);
}

TEST(Spectral, SymmetricSplit) {
    const auto r = band_rates(Curve::constant(1, 400, 900), ideal_chain(400, 900, 650, 10));
    EXPECT_NEAR(r.red_cps / r.blue_cps, 1.0, 1e-9);
    EXPECT_NEAR(r.red_cps, 240.0, 0.5);
}

TEST(Spectral, IllustrativeStackWrongWayBound) {
    const auto chain = illustrative_chain();
    for (const auto& q : toy_quasars()) {
        const auto r = band_rates(q, chain);
        EXPECT_LT(r.f_blue_to_red, 2e-5);
        EXPECT_LT(r.f_red_to_blue, 2e-5);
        EXPECT_GT(r.red_cps, 0);
        EXPECT_GT(r.blue_cps, 0);
    }
}

TEST(Spectral, LinearInFlux) {
    const auto chain = illustrative_chain();
    const auto q = toy_quasars()[0];
    auto q2 = q;
    for (auto& v : q2.value) v *= 2;
    const auto a = band_rates(q, chain), b = band_rates(q2, chain);
    EXPECT_NEAR(b.red_cps, 2 * a.red_cps, 1e-9 * a.red_cps);
    EXPECT_NEAR(b.blue_cps, 2 * a.blue_cps, 1e-9 * a.blue_cps);
    EXPECT_NEAR(b.f_blue_to_red, a.f_blue_to_red, 1e-15);
}

TEST(Spectral, CoverageGapIsAnError) {
    auto chain = illustrative_chain();
    chain.qe = Curve::constant(0.5, 500, 900);
    EXPECT_THROW(band_rates(Curve::constant(1, 400, 900), chain), DataError);
    EXPECT_THROW(Curve::parse_csv("400,1\n399,1\n").validate(false), DataError);
    EXPECT_THROW(Curve::parse_csv("400,1\n500,1.5\n").validate(true), DataError);
}

TEST(Spectral, RankingSingleAndZeroRed) {
    const auto sky = illustrative_skyglow();
    const auto qs = toy_quasars();
    EXPECT_EQ(rank_filter_sets({illustrative_chain()}, qs, sky).front().index, 0u);
    auto dead = illustrative_chain();
    dead.name = "dead";
    dead.lp1 = Curve::constant(0, 350, 1000);
    const auto r = rank_filter_sets({dead, illustrative_chain()}, qs, sky);
    EXPECT_EQ(r.back().name, "dead");
    EXPECT_THROW(rank_filter_sets({}, qs, sky), DomainError);
}

TEST(Spectral, ShorterCutoffWinsUnderRisingSkyglow) {
    // Bright skyglow beyond 700 nm; faint source. Oracle: evaluate the red-port SNR directly.
    auto sky = illustrative_skyglow();
    for (auto& v : sky.value) v *= 200;
    const std::vector<Curve> qs{Curve::constant(1, 350, 1000)};
    const auto shortc = illustrative_chain(700), longc = illustrative_chain(900);
    const auto r = rank_filter_sets({longc, shortc}, qs, sky);
    auto red_snr = [&](const FilterChain& c) { return snr(band_rates(qs[0], c).red_cps, band_rates(sky, c).red_cps); };
    ASSERT_GT(red_snr(shortc), red_snr(longc));
    EXPECT_EQ(r.front().index, 1u);
}

TEST(Spectral, CurveInterpolation) {
    const Curve c{{400, 500}, {0, 1}};
    EXPECT_NEAR(c.at(450), 0.5, 1e-12);
    EXPECT_THROW(c.at(399), DataError);
    EXPECT_NEAR(airmass_of_altitude(90), 1.0, 1e-3);
}
