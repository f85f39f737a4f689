#include "cosmicbell/sim.hpp"

#include "cosmicbell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cosmicbell::sim {

namespace {

using events::Channel;
using events::EventRecord;

constexpr std::uint64_t kStreamPairs = 100;
constexpr std::uint64_t kStreamDark = 200;

std::uint64_t to_ps(double seconds) { return static_cast<std::uint64_t>(std::llround(seconds * 1e12)); }

void apply_dead_time(std::vector<EventRecord>& v, double dead_ns) {
    if (dead_ns <= 0 || v.empty()) return;
    const auto dead = static_cast<std::uint64_t>(std::llround(dead_ns * 1e3));
    std::vector<EventRecord> kept;
    kept.reserve(v.size());
    std::array<std::optional<std::uint64_t>, 8> last{};
    for (const auto& e : v) {
        auto& l = last[static_cast<std::size_t>(e.channel)];
        if (l && e.t_ps - *l < dead) continue;
        l = e.t_ps;
        kept.push_back(e);
    }
    v.swap(kept);
}

// Setting held by the modulator at time t: latest photon with t_photon + tau_set <= t.
std::optional<int> latched_setting(const std::vector<EventRecord>& crng, std::uint64_t t, std::uint64_t set_ps) {
    if (t < set_ps) return std::nullopt;
    const std::uint64_t limit = t - set_ps;
    auto it = std::upper_bound(crng.begin(), crng.end(), limit, [](std::uint64_t x, const EventRecord& e) { return x < e.t_ps; });
    if (it == crng.begin()) return std::nullopt;
    return events::crng_setting(std::prev(it)->channel);
}

// Intersection of two sorted, disjoint interval lists.
std::vector<std::pair<std::uint64_t, std::uint64_t>> intersect(const events::IntervalSet& a, const events::IntervalSet& b) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    std::size_t i = 0, j = 0;
    while (i < a.intervals.size() && j < b.intervals.size()) {
        const auto lo = std::max(a.intervals[i].t_start, b.intervals[j].t_start);
        const auto hi = std::min(a.intervals[i].t_end, b.intervals[j].t_end);
        if (lo < hi) out.emplace_back(lo, hi);
        if (a.intervals[i].t_end < b.intervals[j].t_end) ++i;
        else ++j;
    }
    return out;
}

std::uint64_t apply_clock_b(double t_ps, const SimConfig& cfg) {
    const double v = t_ps * (1.0 + cfg.clock_drift) + cfg.clock_offset_ps;
    return v <= 0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
}

}  // namespace

double CounterRng::exponential(double rate) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u) / rate;
}

double CounterRng::normal() {
    // Box-Muller, one value per call
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SimConfig::validate() const {
    if (!(visibility >= 0 && visibility <= 1)) throw DataError("visibility must be in [0,1]");
    if (!(heralding_a >= 0 && heralding_a <= 1) || !(heralding_b >= 0 && heralding_b <= 1))
        throw DataError("heralding efficiencies must be in [0,1]");
    if (!(pair_rate_cps >= 0) || !(pol_dark_cps >= 0) || !(jitter_ps >= 0) || !(dead_time_ns >= 0))
        throw DataError("rates, jitter and dead time must be >= 0");
    if (target_trials && !(*target_trials > 0)) throw DataError("target_trials must be > 0");
    if (!(duration_s > 0)) throw DataError("session duration must be > 0");
    if (!(std::fabs(clock_drift) < 1e-4)) throw DataError("clock drift must be below 1e-4");
    crng.validate();
    delays_a.validate();
    delays_b.validate();
}

SimConfig SimConfig::pair1_defaults() {
    SimConfig c;
    c.crng.a.ports[0] = {2094, 288, 300, 0};
    c.crng.a.ports[1] = {2774, 350, 300, 0};
    c.crng.b.ports[0] = {9320, 358, 300, 0};
    c.crng.b.ports[1] = {5064, 408, 300, 0};
    c.delays_a.tau_set_ns = 325;
    c.delays_a.tau_buffer_ns = 150;
    c.delays_b.tau_set_ns = 430;
    c.delays_b.tau_buffer_ns = 150;
    c.tau_valid_a_us = 2.34;
    c.tau_valid_b_us = 0.90;
    c.duration_s = 17 * 60.0;
    c.target_trials = 17633;
    return c;
}

std::vector<EventRecord> simulate_poisson(Channel ch, double rate_cps, double duration_s, std::uint64_t seed,
                                          std::uint64_t stream) {
    if (!(duration_s > 0)) throw DomainError("stream duration must be > 0");
    if (!(rate_cps >= 0)) throw DomainError("stream rate must be >= 0");
    std::vector<EventRecord> out;
    if (rate_cps == 0) return out;
    CounterRng rng(seed, stream);
    out.reserve(static_cast<std::size_t>(rate_cps * duration_s * 1.01 + 16));
    const double end_ps = duration_s * 1e12;
    const double rate_per_ps = rate_cps * 1e-12;
    double t = 0;
    while (true) {
        t += rng.exponential(rate_per_ps);
        if (t >= end_ps) break;
        out.push_back({static_cast<std::uint64_t>(t), ch});
    }
    return out;
}

std::vector<EventRecord> simulate_crng_stream(const predict::SideRates& rates, geom::Side side, double duration_s,
                                              std::uint64_t seed) {
    const bool a = side == geom::Side::A;
    const Channel red = a ? Channel::a_red : Channel::b_red;
    const Channel blue = a ? Channel::a_blue : Channel::b_blue;
    auto r = simulate_poisson(red, predict::port_rate(rates, 0), duration_s, seed, static_cast<std::uint64_t>(red));
    auto b = simulate_poisson(blue, predict::port_rate(rates, 1), duration_s, seed, static_cast<std::uint64_t>(blue));
    std::vector<EventRecord> out;
    out.reserve(r.size() + b.size());
    std::merge(r.begin(), r.end(), b.begin(), b.end(), std::back_inserter(out),
               [](const EventRecord& x, const EventRecord& y) { return x.t_ps < y.t_ps; });
    return out;
}

double p_equal(double visibility, double theta_a_deg, double theta_b_deg) {
    return 0.5 * (1.0 - visibility * std::cos(2.0 * (theta_a_deg - theta_b_deg) * std::numbers::pi / 180.0));
}

SimResult simulate_trials(const SimConfig& cfg) {
    cfg.validate();
    SimResult res;
    res.session_ps = to_ps(cfg.duration_s);
    auto crng_a = simulate_crng_stream(cfg.crng.a, geom::Side::A, cfg.duration_s, cfg.seed);
    auto crng_b = simulate_crng_stream(cfg.crng.b, geom::Side::B, cfg.duration_s, cfg.seed);
    apply_dead_time(crng_a, cfg.dead_time_ns);
    apply_dead_time(crng_b, cfg.dead_time_ns);

    const auto set_a = static_cast<std::uint64_t>(std::llround(cfg.delays_a.tau_set_ns * 1e3));
    const auto set_b = static_cast<std::uint64_t>(std::llround(cfg.delays_b.tau_set_ns * 1e3));

    // Emission windows: whole session, or the jointly valid setting windows.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> windows;
    if (cfg.mode == GenerationMode::full) {
        windows.emplace_back(0, res.session_ps);
    } else {
        const auto ia = events::build_setting_intervals(crng_a, geom::Side::A, cfg.delays_a, cfg.tau_valid_a_us);
        const auto ib = events::build_setting_intervals(crng_b, geom::Side::B, cfg.delays_b, cfg.tau_valid_b_us);
        windows = intersect(ia, ib);
    }
    for (const auto& [lo, hi] : windows) res.joint_valid_ps += hi - lo;

    res.pair_rate_cps = cfg.pair_rate_cps;
    if (cfg.target_trials && cfg.mode == GenerationMode::gated) {
        const double measure_s = static_cast<double>(res.joint_valid_ps) * 1e-12;
        const double eff = cfg.heralding_a * cfg.heralding_b;
        res.pair_rate_cps = measure_s > 0 && eff > 0 ? *cfg.target_trials / (measure_s * eff) : 0.0;
    }

    std::vector<EventRecord> pol_a, pol_b;
    CounterRng rng(cfg.seed, kStreamPairs);
    CounterRng dark(cfg.seed, kStreamDark);
    const double rate_ps = res.pair_rate_cps * 1e-12;
    const double dark_ps = cfg.pol_dark_cps * 1e-12;

    for (const auto& [lo, hi] : windows) {
        // Pairs: Poisson process restricted to [lo, hi).
        if (rate_ps > 0) {
            double t = static_cast<double>(lo);
            while (true) {
                t += rng.exponential(rate_ps);
                if (t >= static_cast<double>(hi)) break;
                ++res.pairs_generated;
                const bool det_a = rng.uniform() < cfg.heralding_a;
                const bool det_b = rng.uniform() < cfg.heralding_b;
                const double ta = std::max(0.0, t + cfg.jitter_ps * rng.normal());
                const double tb = std::max(0.0, t + cfg.jitter_ps * rng.normal());
                const int out_a = rng.uniform() < 0.5 ? 1 : -1;
                const double u_b = rng.uniform();
                int out_b = rng.uniform() < 0.5 ? 1 : -1;
                const auto ta_ps = static_cast<std::uint64_t>(ta);
                const auto tb_true = static_cast<std::uint64_t>(tb);
                if (det_a && det_b) {
                    const auto sa = latched_setting(crng_a, ta_ps, set_a);
                    const auto sb = latched_setting(crng_b, tb_true, set_b);
                    if (sa && sb) {
                        const double peq = p_equal(cfg.visibility, cfg.angles.alice[static_cast<std::size_t>(*sa - 1)],
                                                   cfg.angles.bob[static_cast<std::size_t>(*sb - 1)]);
                        out_b = u_b < peq ? out_a : -out_a;
                    }
                }
                if (det_a) pol_a.push_back({ta_ps, out_a > 0 ? Channel::a_plus : Channel::a_minus});
                if (det_b) pol_b.push_back({tb_true, out_b > 0 ? Channel::b_plus : Channel::b_minus});
            }
        }
        if (dark_ps > 0) {
            for (int k = 0; k < 4; ++k) {
                double t = static_cast<double>(lo);
                while (true) {
                    t += dark.exponential(dark_ps);
                    if (t >= static_cast<double>(hi)) break;
                    const auto tp = static_cast<std::uint64_t>(t);
                    switch (k) {
                        case 0: pol_a.push_back({tp, Channel::a_plus}); break;
                        case 1: pol_a.push_back({tp, Channel::a_minus}); break;
                        case 2: pol_b.push_back({tp, Channel::b_plus}); break;
                        default: pol_b.push_back({tp, Channel::b_minus}); break;
                    }
                }
            }
        }
    }
    auto by_time = [](const EventRecord& x, const EventRecord& y) {
        return x.t_ps != y.t_ps ? x.t_ps < y.t_ps : x.channel < y.channel;
    };
    std::sort(pol_a.begin(), pol_a.end(), by_time);
    std::sort(pol_b.begin(), pol_b.end(), by_time);
    apply_dead_time(pol_a, cfg.dead_time_ns);
    apply_dead_time(pol_b, cfg.dead_time_ns);

    // Side-B clock error applies to everything recorded at B.
    if (cfg.clock_offset_ps != 0 || cfg.clock_drift != 0) {
        for (auto& e : crng_b) e.t_ps = apply_clock_b(static_cast<double>(e.t_ps), cfg);
        for (auto& e : pol_b) e.t_ps = apply_clock_b(static_cast<double>(e.t_ps), cfg);
    }

    res.events.reserve(crng_a.size() + crng_b.size() + pol_a.size() + pol_b.size());
    for (auto* v : {&crng_a, &crng_b, &pol_a, &pol_b}) res.events.insert(res.events.end(), v->begin(), v->end());
    std::sort(res.events.begin(), res.events.end(), by_time);
    return res;
}

EndToEndReport end_to_end_check(const SimConfig& cfg, const std::optional<signif::EpsilonInputs>& eps_override,
                                const signif::MemoryBoundOptions& mem) {
    EndToEndReport r;
    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw DataError(std::string("stage ") + name + ": " + e.what());
        }
    };
    const SimResult sim = stage("simulate", [&] { return simulate_trials(cfg); });
    const events::PipelineResult pipe = stage("events", [&] {
        events::PipelineOptions opt;
        opt.delays_a = cfg.delays_a;
        opt.delays_b = cfg.delays_b;
        opt.tau_valid_a_us = cfg.tau_valid_a_us;
        opt.tau_valid_b_us = cfg.tau_valid_b_us;
        opt.session_ps = sim.session_ps;
        if (cfg.clock_offset_ps != 0 || cfg.clock_drift != 0) opt.drift = events::DriftOptions{};
        return events::run_pipeline(events::split_streams(sim.events), opt);
    });
    r.duty = pipe.gated.duty;
    stage("chsh", [&] {
        r.counts = chsh::tabulate(pipe.gated.trials);
        r.correlations = chsh::correlations(r.counts);
        r.independence = chsh::settings_independence(r.counts);
        r.no_signaling = chsh::no_signaling(r.counts);
        return 0;
    });
    r.predictability = stage("predict", [&] { return predict::excess_predictability(cfg.crng); });
    stage("signif", [&] {
        signif::SignificanceInput in{r.counts, eps_override.value_or(signif::EpsilonInputs::from_table(r.predictability))};
        r.significance = signif::analyze(in, mem);
        return 0;
    });
    r.visibility_ok = std::fabs(r.correlations.V - cfg.visibility) <= 0.02;
    r.independence_ok = r.independence.p_value > 0.01;
    r.no_signaling_ok = r.no_signaling.aggregate_p > 0.01;
    r.violation = r.correlations.S > 2.0 && r.significance.violation;
    return r;
}

}  // namespace cosmicbell::sim
