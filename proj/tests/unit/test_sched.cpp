#include "cosmicbell/config.hpp"
#include "cosmicbell/errors.hpp"
#include "cosmicbell/sched.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cosmicbell;
using namespace cosmicbell::sched;

namespace {

CatalogEntry entry(const fixtures::Quasar& q, double rmag) { return {q.id, q.ra, q.dec, q.z, rmag}; }

ScheduleSetup setup_from_defaults() {
    const auto cfg = config::RunConfig::defaults();
    ScheduleSetup s;
    s.stations = cfg.stations;
    s.delays_a = cfg.delays_a;
    s.delays_b = cfg.delays_b;
    s.start = geom::parse_utc("2018-01-11T00:00:00Z");
    s.duration_min = 90;
    return s;
}

}  // namespace

TEST(Sched, EmptyCatalog) {
    EXPECT_TRUE(filter_catalog({}).empty());
    EXPECT_THROW(score_pairs({}, setup_from_defaults(), cosmo::Cosmology{}), DomainError);
}

TEST(Sched, KeepsBrighterOfEqualRedshift) {
    const std::vector<CatalogEntry> c{{"faint", 11.0, 11.0, 2.0, 18.5}, {"bright", 11.5, 11.2, 2.0, 17.0}};
    const auto f = filter_catalog(c);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].id, "bright");
}

TEST(Sched, MagnitudeCutAndParetoFront) {
    const std::vector<CatalogEntry> c{{"cut", 1, 1, 3.0, 19.5}, {"hiz", 1.2, 1.1, 3.0, 18.0},
                                      {"loz_bright", 1.3, 1.2, 1.0, 16.0}, {"dominated", 1.4, 1.3, 0.9, 16.5}};
    const auto f = filter_catalog(c);
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f[0].id, "hiz");
    EXPECT_EQ(f[1].id, "loz_bright");
}

TEST(Sched, LargeSyntheticCatalogShrinksByAnOrderOfMagnitude) {
    // Counts rising steeply toward faint magnitudes, uniform over a sky band.
    std::mt19937_64 rng(62000);
    std::uniform_real_distribution<double> ra(0, 360), sin_dec(-0.3, 0.9), u(0, 1);
    std::uniform_real_distribution<double> z(0.1, 4.5);
    std::vector<CatalogEntry> c;
    for (int k = 0; k < 62000; ++k) {
        // cumulative N(<m) ~ 10^(0.7 m) on [15, 21]
        const double m = std::log10(std::pow(10.0, 0.7 * 15) + u(rng) * (std::pow(10.0, 0.7 * 21) - std::pow(10.0, 0.7 * 15))) / 0.7;
        c.push_back({"Q" + std::to_string(k), ra(rng), std::asin(sin_dec(rng)) * 180 / 3.141592653589793, z(rng), m});
    }
    const auto f = filter_catalog(c);
    EXPECT_GT(f.size(), 1000u);
    EXPECT_LT(f.size(), 16000u);
}

TEST(Sched, Observability) {
    const auto site = config::RunConfig::defaults().stations.receiver_b;
    const auto start = geom::parse_utc("2018-01-11T00:00:00Z");
    const auto polar = observability({"polar", 0, 89.5, 1, 16}, site, start, 90);
    EXPECT_EQ(static_cast<std::size_t>(polar.minutes_visible), polar.alt_deg.size());
    EXPECT_EQ(observability({"south", 0, -70, 1, 16}, site, start, 90).minutes_visible, 0);

    const auto j = observability(entry(fixtures::kJ0831, 18), site, start, 90);
    ASSERT_GE(j.alt_deg.size(), 82u);
    EXPECT_NEAR(j.alt_deg[20], 57.0, 1.0);
    EXPECT_NEAR(j.alt_deg[81], 64.0, 1.0);
    EXPECT_GT(j.alt_deg[81], j.alt_deg[20]);
}

TEST(Sched, SameSourceIsRejected) {
    const auto q = entry(fixtures::kJ0831, 17.5);
    auto twin = q;
    twin.id = "twin";
    const auto s = score_pairs({q, twin}, setup_from_defaults(), cosmo::Cosmology{});
    EXPECT_TRUE(s.empty());
}

TEST(Sched, HighRedshiftPairRanksAboveLowRedshiftPair) {
    std::vector<CatalogEntry> c{entry(fixtures::kB0350, 17.0), entry(fixtures::kJ0831, 17.5),
                                {"lowA", fixtures::kB0350.ra + 0.5, fixtures::kB0350.dec, 0.15, 17.0},
                                {"lowB", fixtures::kJ0831.ra + 0.5, fixtures::kJ0831.dec, 0.2, 17.5}};
    const auto s = score_pairs(c, setup_from_defaults(), cosmo::Cosmology{});
    double f_pub = -1, f_low = -1;
    for (const auto& p : s) {
        const bool pub = (p.id_a == c[0].id && p.id_b == c[1].id) || (p.id_a == c[1].id && p.id_b == c[0].id);
        const bool low = (p.id_a == "lowA" && p.id_b == "lowB") || (p.id_a == "lowB" && p.id_b == "lowA");
        if (pub) f_pub = std::max(f_pub, p.f_excl);
        if (low) f_low = std::max(f_low, p.f_excl);
        EXPECT_GT(p.min_tau_valid_a_us, 0.0);
        EXPECT_GT(p.min_tau_valid_b_us, 0.0);
        EXPECT_EQ(static_cast<std::size_t>(p.minutes), p.valid_minutes.size());
    }
    ASSERT_GE(f_pub, 0.0);
    ASSERT_GE(f_low, 0.0);
    EXPECT_GT(f_pub, f_low);
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_FALSE(ranks_before(s[k], s[k - 1]));
}

TEST(Sched, LongerWindowWinsTies) {
    PairScore shortp, longp;
    shortp.id_a = "a";
    shortp.id_b = "b";
    longp.id_a = "c";
    longp.id_b = "d";
    shortp.f_excl = longp.f_excl = 0.9;
    shortp.minutes = 3;
    longp.minutes = 17;
    shortp.nu_per_minute = longp.nu_per_minute = 0.8;
    shortp.expected_nu = 0.8 * std::sqrt(3.0);
    longp.expected_nu = 0.8 * std::sqrt(17.0);
    EXPECT_TRUE(ranks_before(longp, shortp));
    shortp.expected_nu = longp.expected_nu;
    EXPECT_TRUE(ranks_before(longp, shortp));
    EXPECT_FALSE(ranks_before(shortp, longp));
}

TEST(Sched, CatalogIo) {
    const auto dir = fixtures::scratch_dir("sched_io");
    const std::vector<CatalogEntry> c{entry(fixtures::kB0350, 17.2), entry(fixtures::kB0422, 16.8)};
    write_catalog_csv(dir + "/c.csv", c);
    const auto back = read_catalog_csv(dir + "/c.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].id, c[1].id);
    EXPECT_NEAR(back[0].z, c[0].z, 1e-9);
    EXPECT_THROW(read_catalog_csv(dir + "/nope.csv"), DataError);
    EXPECT_EQ(read_catalog_csv(fixtures::data_path("demo_catalog.csv")).size(), 18u);
}
