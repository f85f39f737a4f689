#include "cosmicbell/events.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

using namespace cosmicbell;
using namespace cosmicbell::events;

namespace {

struct Streams {
    std::vector<std::uint64_t> a, b;
};

// Correlated pairs plus independent background; side B clock = offset + (1 + drift) * t.
Streams correlated(double seconds, double pair_cps, double noise_cps, double offset_ps, double drift, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Streams s;
    auto poisson_times = [&](double rate, auto emit) {
        std::exponential_distribution<double> gap(rate);
        for (double t = gap(rng); t < seconds; t += gap(rng)) emit(t * 1e12);
    };
    const double base = 5e6;  // keep B timestamps positive
    if (pair_cps > 0) poisson_times(pair_cps, [&](double t) {
        s.a.push_back(static_cast<std::uint64_t>(base + t));
        s.b.push_back(static_cast<std::uint64_t>(base + offset_ps + (1 + drift) * t));
    });
    poisson_times(noise_cps, [&](double t) { s.a.push_back(static_cast<std::uint64_t>(base + t)); });
    poisson_times(noise_cps, [&](double t) { s.b.push_back(static_cast<std::uint64_t>(base + offset_ps + (1 + drift) * t)); });
    std::sort(s.a.begin(), s.a.end());
    std::sort(s.b.begin(), s.b.end());
    return s;
}

std::vector<EventRecord> random_session(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> ch(0, 7);
    std::uniform_int_distribution<std::uint64_t> gap(1, 20000);
    std::vector<EventRecord> ev(n);
    std::uint64_t t = 0;
    for (auto& e : ev) {
        t += gap(rng);
        e = {t, static_cast<Channel>(ch(rng))};
    }
    return ev;
}

std::vector<std::int64_t> to_signed(const std::vector<std::uint64_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Events, ChannelNames) {
    for (int c = 0; c < 8; ++c) EXPECT_EQ(channel_from_name(channel_name(static_cast<Channel>(c))), static_cast<Channel>(c));
    EXPECT_THROW(channel_from_name("c_green"), DataError);
    EXPECT_EQ(crng_setting(Channel::b_red), 1);
    EXPECT_EQ(crng_setting(Channel::a_blue), 2);
    EXPECT_EQ(pol_outcome(Channel::a_minus), -1);
}

TEST(Events, FileFormatsRoundTrip) {
    const auto dir = fixtures::scratch_dir("events_io");
    const auto ev = random_session(5000, 1);
    write_events_csv(dir + "/e.csv", ev);
    write_events_binary(dir + "/e.bin", ev);
    EXPECT_EQ(read_events(dir + "/e.csv"), ev);
    EXPECT_EQ(read_events(dir + "/e.bin"), ev);
    std::ifstream in(dir + "/e.bin", std::ios::binary | std::ios::ate);
    EXPECT_EQ(static_cast<std::size_t>(in.tellg()), ev.size() * 9);
}

TEST(Events, BinaryLayoutIsLittleEndian) {
    const std::vector<std::uint8_t> bytes{6, 0x01, 0x02, 0, 0, 0, 0, 0, 0};
    const auto ev = parse_events_binary(bytes);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_EQ(ev[0].channel, Channel::b_plus);
    EXPECT_EQ(ev[0].t_ps, 0x0201u);
    EXPECT_THROW(parse_events_binary(std::vector<std::uint8_t>(10, 0)), DataError);
}

TEST(Events, SplitSortsPerSide) {
    std::vector<EventRecord> ev{{50, Channel::a_plus}, {10, Channel::a_red}, {5, Channel::b_minus}, {7, Channel::b_blue}};
    const auto s = split_streams(ev);
    ASSERT_EQ(s.a.crng.size(), 1u);
    ASSERT_EQ(s.a.pol.size(), 1u);
    EXPECT_EQ(s.b.crng[0].t_ps, 7u);
    EXPECT_EQ(s.b.pol[0].t_ps, 5u);
}

TEST(Events, CoincidenceWindowExamples) {
    const std::vector<std::int64_t> a{1000000};
    EXPECT_EQ(find_coincidences(a, std::vector<std::int64_t>{1001000}).size(), 1u);
    EXPECT_TRUE(find_coincidences(a, std::vector<std::int64_t>{1003000}).empty());
    CoincidenceWindow w;
    EXPECT_EQ(w.max_separation_ps(), 1330);
    w.convention = WindowConvention::half_width;
    EXPECT_EQ(w.max_separation_ps(), 2660);
    EXPECT_EQ(find_coincidences(a, std::vector<std::int64_t>{1002000}, w).size(), 1u);
}

TEST(Events, EachEventMatchedAtMostOnce) {
    const std::vector<std::int64_t> a{0, 500, 1000}, b{200, 700};
    const auto c = find_coincidences(a, b);
    std::vector<std::size_t> ia, ib;
    for (const auto& x : c) ia.push_back(x.ia), ib.push_back(x.ib);
    EXPECT_EQ(std::adjacent_find(ia.begin(), ia.end()), ia.end());
    EXPECT_EQ(std::adjacent_find(ib.begin(), ib.end()), ib.end());
    EXPECT_EQ(c.size(), 2u);
}

TEST(Events, MatchingIsSymmetric) {
    const auto s = correlated(0.2, 2e4, 5e4, 0, 0, 8);
    const auto ab = find_coincidences(to_signed(s.a), to_signed(s.b));
    const auto ba = find_coincidences(to_signed(s.b), to_signed(s.a));
    ASSERT_EQ(ab.size(), ba.size());
    for (std::size_t k = 0; k < ab.size(); ++k) {
        EXPECT_EQ(ab[k].ia, ba[k].ib);
        EXPECT_EQ(ab[k].ib, ba[k].ia);
    }
}

TEST(Events, AccidentalRateMatchesAnalytic) {
    const double ra = 2e5, rb = 3e5, T = 2.0;
    std::mt19937_64 rng(21);
    auto stream = [&](double rate) {
        std::vector<std::int64_t> v;
        std::exponential_distribution<double> gap(rate);
        for (double t = gap(rng); t < T; t += gap(rng)) v.push_back(static_cast<std::int64_t>(t * 1e12));
        return v;
    };
    const auto a = stream(ra), b = stream(rb);
    const double expected = ra * rb * 2.66e-9 * T;
    const double got = static_cast<double>(find_coincidences(a, b).size());
    EXPECT_NEAR(got, expected, 3 * std::sqrt(expected));
}

TEST(Events, SettingIntervals) {
    geom::ChannelDelays d{325, 150};
    std::vector<EventRecord> one{{0, Channel::a_red}};
    const auto s1 = build_setting_intervals(one, Side::A, d, 2.34);
    ASSERT_EQ(s1.intervals.size(), 1u);
    EXPECT_EQ(s1.intervals[0].t_start, 325000u);
    EXPECT_EQ(s1.intervals[0].t_end, 2665000u);
    EXPECT_EQ(s1.intervals[0].setting, 1);

    std::vector<EventRecord> two{{0, Channel::a_red}, {1000000, Channel::a_blue}};
    const auto s2 = build_setting_intervals(two, Side::A, d, 2.34);
    ASSERT_EQ(s2.intervals.size(), 2u);
    EXPECT_EQ(s2.intervals[0].t_end - s2.intervals[0].t_start, 1000000u);
    EXPECT_EQ(s2.intervals[1].setting, 2);

    const auto none = build_setting_intervals(one, Side::A, d, -0.18);
    EXPECT_TRUE(none.intervals.empty());
    EXPECT_TRUE(none.warning.has_value());
    EXPECT_THROW(build_setting_intervals(one, Side::B, d, 1.0), DataError);
}

TEST(Events, GatingKeepsOnlyCoveredCoincidences) {
    geom::ChannelDelays d{0, 0};
    std::vector<EventRecord> crng_a{{0, Channel::a_blue}}, crng_b{{0, Channel::b_red}};
    const auto ia = build_setting_intervals(crng_a, Side::A, d, 1.0);
    const auto ib = build_setting_intervals(crng_b, Side::B, d, 1.0);
    std::vector<EventRecord> pa{{500000, Channel::a_plus}, {1001000, Channel::a_minus}};
    std::vector<EventRecord> pb{{500100, Channel::b_minus}, {1001000, Channel::b_plus}};
    const std::vector<Coincidence> c{{0, 0}, {1, 1}};
    const auto g = gate_and_label(c, pa, pb, ia, ib, 2000000);
    ASSERT_EQ(g.trials.size(), 1u);
    EXPECT_EQ(g.trials[0].setting_a, 2);
    EXPECT_EQ(g.trials[0].setting_b, 1);
    EXPECT_EQ(g.trials[0].outcome_a, 1);
    EXPECT_EQ(g.trials[0].outcome_b, -1);
    EXPECT_NEAR(g.duty.duty_a, 0.5, 1e-12);
    EXPECT_NEAR(g.duty.joint_duty, 0.5, 1e-12);
}

TEST(Events, TrialsJsonlRoundTrip) {
    const auto dir = fixtures::scratch_dir("trials_io");
    std::vector<TrialRecord> t{{1, 2, 1, 2, 1, -1}, {10, 12, 2, 2, -1, -1}};
    write_trials_jsonl(dir + "/t.jsonl", t);
    EXPECT_EQ(read_trials_jsonl(dir + "/t.jsonl"), t);
}

TEST(Events, DriftZero) {
    const auto s = correlated(1.0, 2e4, 2e4, 0, 0, 2);
    DriftOptions o;
    o.block_s = 0.1;
    const auto m = estimate_clock_drift(s.a, s.b, o);
    for (double off : m.offsets_ps) EXPECT_NEAR(off, 0.0, 100.0);
}

TEST(Events, DriftConstantOffset) {
    const auto s = correlated(1.0, 2e4, 2e4, 1e6, 0, 3);
    DriftOptions o;
    o.block_s = 0.1;
    const auto m = estimate_clock_drift(s.a, s.b, o);
    for (double off : m.offsets_ps) EXPECT_NEAR(off, -1e6, 100.0);
}

TEST(Events, DriftLinear) {
    const double drift = 1e-5;
    const auto s = correlated(1.0, 1e5, 2e4, 0, drift, 4);
    DriftOptions o;
    o.block_s = 0.002;
    const auto m = estimate_clock_drift(s.a, s.b, o);
    const double expected = -drift / (1 + drift);
    EXPECT_NEAR(m.slope(), expected, 0.01 * std::fabs(expected));
}

TEST(Events, DriftNoLock) {
    const auto s = correlated(1.0, 0.0, 2e3, 0, 0, 6);  // background only
    const auto& a = s.a;
    const auto& b = s.b;
    EXPECT_THROW(estimate_clock_drift(a, b), NoLockError);
    EXPECT_THROW(estimate_clock_drift({}, b), DataError);
}

TEST(Events, DriftCorrectionRecoversCoincidences) {
    const auto s = correlated(1.0, 2e4, 2e4, 1e6, 0, 5);
    DriftOptions o;
    o.block_s = 0.1;
    const auto m = estimate_clock_drift(s.a, s.b, o);
    std::vector<EventRecord> pa, pb;
    for (auto t : s.a) pa.push_back({t, Channel::a_plus});
    for (auto t : s.b) pb.push_back({t, Channel::b_plus});
    const auto raw = find_coincidences(pa, pb, DriftModel{});
    const auto fixed = find_coincidences(pa, pb, m);
    EXPECT_GT(fixed.size(), 18000u);
    EXPECT_LT(raw.size(), 1000u);
}

TEST(Events, PipelineDeterministic) {
    const auto ev = random_session(200000, 77);
    PipelineOptions o;
    o.delays_a = {325, 150};
    o.delays_b = {430, 150};
    o.tau_valid_a_us = 2.34;
    o.tau_valid_b_us = 0.9;
    const auto r1 = run_pipeline(split_streams(ev), o);
    const auto r2 = run_pipeline(split_streams(ev), o);
    EXPECT_EQ(r1.coincidences, r2.coincidences);
    EXPECT_EQ(r1.gated.trials, r2.gated.trials);
    EXPECT_EQ(r1.intervals_a.intervals, r2.intervals_a.intervals);
}

TEST(Events, IngestionAndMatchingThroughput) {
    const auto dir = fixtures::scratch_dir("events_speed");
    const auto ev = random_session(2000000, 9);
    write_events_binary(dir + "/e.bin", ev);
    const auto t0 = std::chrono::steady_clock::now();
    const auto back = read_events(dir + "/e.bin");
    const auto s = split_streams(back);
    const auto c = find_coincidences(s.a.pol, s.b.pol, DriftModel{});
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double rate = static_cast<double>(ev.size()) / dt;
    EXPECT_GE(rate, 1e6) << rate << " events/s";
    EXPECT_FALSE(c.empty());
}
