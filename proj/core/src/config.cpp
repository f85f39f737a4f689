#include "cosmicbell/config.hpp"

#include "cosmicbell/errors.hpp"
#include "cosmicbell/version.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace cosmicbell::config {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <std::size_t N>
std::array<double, N> arr(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != N) throw DataError(std::string("'") + key + "' needs " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t k = 0; k < N; ++k) out[k] = v[k].get<double>();
    return out;
}

geom::SitePosition site(const json& j) {
    return {j.at("lat").get<double>(), j.at("lon").get<double>(), j.value("elev_m", 0.0)};
}

geom::ChannelDelays delays(const json& j, geom::ChannelDelays d) {
    d.tau_set_ns = j.value("tau_set_ns", d.tau_set_ns);
    d.tau_buffer_ns = j.value("tau_buffer_ns", d.tau_buffer_ns);
    d.gamma = j.value("gamma", d.gamma);
    d.n_air = j.value("n_air", d.n_air);
    d.fiber_delay_ns = j.value("fiber_delay_ns", d.fiber_delay_ns);
    return d;
}

QuasarSpec quasar(const json& j) {
    QuasarSpec q;
    q.id = j.value("id", std::string{});
    q.ra_deg = j.at("ra").get<double>();
    q.dec_deg = j.at("dec").get<double>();
    q.z = j.at("z").get<double>();
    if (j.contains("az")) q.az_deg = j["az"].get<double>();
    if (j.contains("alt")) q.alt_deg = j["alt"].get<double>();
    return q;
}

predict::PortRates port(const json& j) {
    predict::PortRates p;
    p.signal_cps = j.value("signal_cps", 0.0);
    p.noise_cps = j.value("noise_cps", 0.0);
    p.noise_duration_s = j.value("noise_duration_s", p.noise_duration_s);
    p.f_wrongway = j.value("f_wrongway", 0.0);
    return p;
}

signif::EpsilonInputs eps_inputs(const json& j) {
    signif::EpsilonInputs e;
    e.eps_a = arr<2>(j, "eps_a");
    e.eps_b = arr<2>(j, "eps_b");
    e.sigma_a = j.contains("sigma_a") ? arr<2>(j, "sigma_a") : std::array<double, 2>{};
    e.sigma_b = j.contains("sigma_b") ? arr<2>(j, "sigma_b") : std::array<double, 2>{};
    if (j.contains("eps_ij")) {
        e.eps_ij = arr<4>(j, "eps_ij");
    } else {
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t k = 0; k < 2; ++k) e.eps_ij[2 * i + k] = std::min(1.0, e.eps_a[i] + e.eps_b[k]);
    }
    return e;
}

void apply_sim(const json& j, sim::SimConfig& s) {
    s.visibility = j.value("visibility", s.visibility);
    s.pair_rate_cps = j.value("pair_rate_cps", s.pair_rate_cps);
    if (j.contains("target_trials")) {
        if (j["target_trials"].is_null()) s.target_trials.reset();
        else s.target_trials = j["target_trials"].get<double>();
    }
    s.heralding_a = j.value("heralding_a", s.heralding_a);
    s.heralding_b = j.value("heralding_b", s.heralding_b);
    s.tau_valid_a_us = j.value("tau_valid_a_us", s.tau_valid_a_us);
    s.tau_valid_b_us = j.value("tau_valid_b_us", s.tau_valid_b_us);
    s.duration_s = j.value("duration_s", s.duration_s);
    s.seed = j.value("seed", s.seed);
    s.jitter_ps = j.value("jitter_ps", s.jitter_ps);
    s.pol_dark_cps = j.value("pol_dark_cps", s.pol_dark_cps);
    s.dead_time_ns = j.value("dead_time_ns", s.dead_time_ns);
    s.clock_offset_ps = j.value("clock_offset_ps", s.clock_offset_ps);
    s.clock_drift = j.value("clock_drift", s.clock_drift);
    if (j.contains("mode")) {
        const auto m = j["mode"].get<std::string>();
        if (m == "full") s.mode = sim::GenerationMode::full;
        else if (m == "gated") s.mode = sim::GenerationMode::gated;
        else throw DataError("simulation.mode must be 'full' or 'gated'");
    }
    if (j.contains("angles")) {
        s.angles.alice = arr<2>(j["angles"], "alice");
        s.angles.bob = arr<2>(j["angles"], "bob");
    }
    if (j.contains("crng")) {
        const auto& c = j["crng"];
        for (const char* side : {"A", "B"}) {
            if (!c.contains(side)) continue;
            auto& sr = side[0] == 'A' ? s.crng.a : s.crng.b;
            if (c[side].contains("red")) sr.ports[0] = port(c[side]["red"]);
            if (c[side].contains("blue")) sr.ports[1] = port(c[side]["blue"]);
        }
    }
}

}  // namespace

const PairSpec& RunConfig::pair(const std::string& name) const {
    for (const auto& p : pairs)
        if (p.name == name) return p;
    throw DataError("no pair named '" + name + "' in the configuration");
}

std::string RunConfig::resolve(const std::string& path) const {
    const fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

void RunConfig::validate() const {
    cosmology.validate();
    delays_a.validate();
    delays_b.validate();
    for (const auto& p : pairs) {
        if (p.name.empty()) throw DataError("every pair needs a name");
        if (!(p.duration_min >= 0)) throw DataError("pair " + p.name + ": duration must be >= 0");
        if (p.a.z < 0 || p.b.z < 0) throw DataError("pair " + p.name + ": redshifts must be >= 0");
    }
    const int modes = analysis.events.has_value() + analysis.counts.has_value() + analysis.trials.has_value();
    if (modes > 1) throw DataError("analysis: give exactly one of events, trials or counts");
    for (const auto* f : {&analysis.events, &analysis.counts, &analysis.trials, &analysis.rates}) {
        if (*f && !fs::exists(resolve(**f))) throw DataError("referenced file '" + resolve(**f) + "' does not exist");
    }
    if (analysis.eps_override) analysis.eps_override->validate();
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.stations.receiver_a = {28.75410, -17.88915, 2375.0};
    c.stations.receiver_b = {28.760636, -17.8816861, 2352.0};
    c.stations.source = {28.757189, -17.884961, 2385.0};
    c.delays_a.tau_set_ns = 325;
    c.delays_a.tau_buffer_ns = 150;
    c.delays_b.tau_set_ns = 430;
    c.delays_b.tau_buffer_ns = 150;
    PairSpec p1;
    p1.name = "pair1";
    p1.a = {"B0350-073", 58.127300, -7.183976, 0.964, 233.0, 38.0};
    p1.b = {"J0831+5245", 127.923750, 52.754860, 3.911, 35.0, 57.0};
    p1.start = geom::parse_utc("2018-01-11T00:20:00Z");
    p1.duration_min = 17;
    p1.tau_geom_us = std::array<double, 2>{2.81, 1.48};
    PairSpec p2;
    p2.name = "pair2";
    p2.a = {"B0422+004", 66.195175, 0.601758, 0.268, 246.0, 38.0};
    p2.b = {"J0831+5245", 127.923750, 52.754860, 3.911, 21.0, 64.0};
    p2.start = geom::parse_utc("2018-01-11T01:21:00Z");
    p2.duration_min = 12;
    p2.tau_geom_us = std::array<double, 2>{2.67, 1.11};
    c.pairs = {p1, p2};
    c.simulation = sim::SimConfig::pair1_defaults();
    return c;
}

RunConfig RunConfig::from_json(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    RunConfig c = defaults();
    c.base_dir = base_dir;
    try {
        const int version = j.value("schema_version", kSchemaVersion);
        if (version != kSchemaVersion) throw DataError("config schema_version " + std::to_string(version) + " is not supported");
        if (j.contains("cosmology")) c.cosmology = cosmo::CosmologyParams::from_json(j["cosmology"].dump());
        if (j.contains("stations")) {
            const auto& s = j["stations"];
            if (s.contains("receiver_a")) c.stations.receiver_a = site(s["receiver_a"]);
            if (s.contains("receiver_b")) c.stations.receiver_b = site(s["receiver_b"]);
            if (s.contains("source")) c.stations.source = site(s["source"]);
        }
        if (j.contains("delays")) {
            if (j["delays"].contains("A")) c.delays_a = delays(j["delays"]["A"], c.delays_a);
            if (j["delays"].contains("B")) c.delays_b = delays(j["delays"]["B"], c.delays_b);
        }
        if (j.contains("pairs")) {
            c.pairs.clear();
            for (const auto& pj : j["pairs"]) {
                PairSpec p;
                p.name = pj.at("name").get<std::string>();
                p.a = quasar(pj.at("A"));
                p.b = quasar(pj.at("B"));
                if (pj.contains("start")) p.start = geom::parse_utc(pj["start"].get<std::string>());
                p.duration_min = pj.value("duration_min", 0.0);
                if (pj.contains("tau_geom_us")) p.tau_geom_us = arr<2>(pj, "tau_geom_us");
                c.pairs.push_back(p);
            }
        }
        if (j.contains("analysis")) {
            const auto& a = j["analysis"];
            for (auto [key, field] : {std::pair{"events", &c.analysis.events}, {"counts", &c.analysis.counts},
                                      {"trials", &c.analysis.trials}, {"rates", &c.analysis.rates}, {"pair", &c.analysis.pair}})
                if (a.contains(key)) *field = a[key].get<std::string>();
            if (a.contains("eps_override")) c.analysis.eps_override = eps_inputs(a["eps_override"]);
            if (a.contains("tau_valid_us")) c.analysis.tau_valid_us = arr<2>(a, "tau_valid_us");
            c.analysis.window.width_ns = a.value("window_ns", c.analysis.window.width_ns);
            if (a.contains("window_convention")) {
                const auto w = a["window_convention"].get<std::string>();
                if (w == "full_width") c.analysis.window.convention = events::WindowConvention::full_width;
                else if (w == "half_width") c.analysis.window.convention = events::WindowConvention::half_width;
                else throw DataError("window_convention must be 'full_width' or 'half_width'");
            }
            c.analysis.estimate_drift = a.value("estimate_drift", false);
            if (a.contains("memory")) {
                c.analysis.memory.n_max = a["memory"].value("n_max", c.analysis.memory.n_max);
                const auto model = a["memory"].value("model", std::string("committed"));
                if (model == "committed") c.analysis.memory.model = signif::PlanModel::committed;
                else if (model == "adaptive") c.analysis.memory.model = signif::PlanModel::adaptive;
                else throw DataError("memory.model must be 'committed' or 'adaptive'");
            }
        }
        if (j.contains("simulation")) apply_sim(j["simulation"], c.simulation);
        c.output_dir = j.value("output_dir", c.output_dir);
    } catch (const json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto parent = fs::path(path).parent_path();
    return from_json(ss.str(), parent.empty() ? "." : parent.string());
}

std::string to_json(const signif::EpsilonInputs& e) {
    json j{{"eps_ij", e.eps_ij}, {"eps_a", e.eps_a}, {"eps_b", e.eps_b}, {"sigma_a", e.sigma_a}, {"sigma_b", e.sigma_b}};
    return j.dump();
}

}  // namespace cosmicbell::config

namespace cosmicbell {

const char* version() { return COSMICBELL_VERSION; }

}  // namespace cosmicbell
