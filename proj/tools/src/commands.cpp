#include "commands.hpp"

#include "cosmicbell_cli/cli.hpp"

#include "cosmicbell/chsh.hpp"
#include "cosmicbell/cosmo.hpp"
#include "cosmicbell/errors.hpp"
#include "cosmicbell/events.hpp"
#include "cosmicbell/predict.hpp"
#include "cosmicbell/randbits.hpp"
#include "cosmicbell/sched.hpp"
#include "cosmicbell/signif.hpp"
#include "cosmicbell/sim.hpp"
#include "cosmicbell/version.hpp"
#include "digest.hpp"
#include "svg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cosmicbell::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
    config::RunConfig cfg;
    fs::path out;
    std::vector<std::string> inputs;  // files folded into the digest
};

Context open_context(const Common& c) {
    Context ctx;
    if (c.config_path.empty()) {
        ctx.cfg = config::RunConfig::defaults();
    } else {
        ctx.cfg = config::RunConfig::load(c.config_path);
        ctx.inputs.push_back(c.config_path);
    }
    ctx.out = c.out_dir.empty() ? fs::path(ctx.cfg.resolve(ctx.cfg.output_dir)) : fs::path(c.out_dir);
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw DataError("cannot create output directory '" + ctx.out.string() + "': " + ec.message());
    return ctx;
}

json header(const Context& ctx, const std::string& command, const std::string& options) {
    return json{{"tool", "cosmicbell"},
                {"version", cosmicbell::version()},
                {"command", command},
                {"input_digest", input_digest(ctx.inputs, command + "|" + options)}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

// Non-finite values become null in JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

// ---------------------------------------------------------------- cosmo

void lightcone_plots(const cosmo::Cosmology& cos, const cosmo::LightconePair& lp, const cosmo::CommonCause& cc,
                     int samples, const fs::path& dir) {
    const double eta0 = cos.eta0();
    const auto& p = cos.params();
    const double age = cosmo::lookback_time_of_z(cosmo::kInfiniteRedshift, p);
    auto t_of_eta = [&](double eta) {
        if (eta <= 0) return 0.0;
        return age - cosmo::lookback_time_of_a(std::clamp(cos.table().a_of_eta(eta), 0.0, 1.0), p);
    };
    // Emission events sit at x = -chi_A and x = +chi_B on a line through the observer.
    struct Cone {
        std::string name;
        double x, eta;
    };
    const std::vector<Cone> cones{{"experiment", 0.0, eta0}, {"A", -lp.chi_a, lp.eta_a}, {"B", lp.chi_b, lp.eta_b}};
    std::ofstream csv(dir / "lightcone_samples.csv");
    csv << "cone,x_chi,eta,t_gyr\n";
    csv.precision(10);
    const double xmax = eta0 * 1.05;
    SvgPlot conformal("Past light cones, conformal coordinates", "comoving distance chi [c/H0]", "conformal time eta [1/H0]",
                      -xmax, xmax, 0.0, eta0 * 1.05);
    SvgPlot cosmic("Past light cones, cosmic time", "comoving distance chi [c/H0]", "cosmic time t [Gyr]", -xmax, xmax, 0.0,
                   age * 1.05);
    const std::vector<std::string> colours{"black", "#c0392b", "#2471a3"};
    for (std::size_t k = 0; k < cones.size(); ++k) {
        const auto& c = cones[k];
        std::vector<std::pair<double, double>> left_c, right_c, left_t, right_t;
        for (int i = 0; i <= samples; ++i) {
            const double d = c.eta * i / samples;
            const double eta = c.eta - d;
            const double t = t_of_eta(eta);
            left_c.emplace_back(c.x - d, eta);
            right_c.emplace_back(c.x + d, eta);
            left_t.emplace_back(c.x - d, t);
            right_t.emplace_back(c.x + d, t);
            csv << c.name << ',' << c.x - d << ',' << eta << ',' << t << '\n';
            if (i > 0) csv << c.name << ',' << c.x + d << ',' << eta << ',' << t << '\n';
        }
        conformal.line(left_c, colours[k]);
        conformal.line(right_c, colours[k]);
        cosmic.line(left_t, colours[k]);
        cosmic.line(right_t, colours[k]);
        conformal.marker(c.x, c.eta, colours[k], c.name);
        cosmic.marker(c.x, t_of_eta(c.eta), colours[k], c.name);
    }
    if (cc.exists) {
        const double x = (lp.chi_b - lp.chi_a) / 2 + (lp.eta_a - lp.eta_b) / 2;
        conformal.marker(x, cc.eta_ab, "#7d3c98", "latest common past");
        cosmic.marker(x, t_of_eta(cc.eta_ab), "#7d3c98", "latest common past");
    }
    conformal.save((dir / "lightcone_conformal.svg").string());
    cosmic.save((dir / "lightcone_cosmic.svg").string());
}

// ---------------------------------------------------------------- analyze helpers

json counts_json(const chsh::CoincidenceCounts& c) {
    json j = json::object();
    for (std::size_t k = 0; k < 4; ++k) j[chsh::CoincidenceCounts::cell_label(k)] = c.n[k];
    return j;
}

signif::EpsilonInputs read_eps_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open predictability override '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    // Reuse the config parser: the file is the "eps_override" object.
    const auto cfg = config::RunConfig::from_json("{\"analysis\":{\"eps_override\":" + ss.str() + "}}");
    return *cfg.analysis.eps_override;
}

std::array<double, 2> tau_valid_for(const Context& ctx, const AnalyzeOptions& o) {
    if (o.tau_valid_us) return *o.tau_valid_us;
    if (ctx.cfg.analysis.tau_valid_us) return *ctx.cfg.analysis.tau_valid_us;
    const std::string name = !o.pair.empty() ? o.pair : ctx.cfg.analysis.pair.value_or("");
    if (name.empty()) throw UsageError("event analysis needs --tau-valid or a pair for the validity windows");
    const auto& p = ctx.cfg.pair(name);
    if (p.tau_geom_us) {
        return {geom::tau_valid_from_components((*p.tau_geom_us)[0], ctx.cfg.delays_a),
                geom::tau_valid_from_components((*p.tau_geom_us)[1], ctx.cfg.delays_b)};
    }
    const auto ta = geom::SkyTrack::from_radec(p.a.ra_deg, p.a.dec_deg, ctx.cfg.stations.receiver_a, p.start, p.duration_min);
    const auto tb = geom::SkyTrack::from_radec(p.b.ra_deg, p.b.dec_deg, ctx.cfg.stations.receiver_b, p.start, p.duration_min);
    return {geom::tau_valid(geom::Side::A, ta, ctx.cfg.stations, ctx.cfg.delays_a).tau_valid_us,
            geom::tau_valid(geom::Side::B, tb, ctx.cfg.stations, ctx.cfg.delays_b).tau_valid_us};
}

void p_left_plot(const signif::MemoryBoundResult& m, const fs::path& dir) {
    std::ofstream csv(dir / "p_left.csv");
    csv << "n,p_left_max\n";
    csv.precision(12);
    double lo = 1.0, hi = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < m.p_left.size(); ++k) {
        csv << k + 1 << ',' << m.p_left[k] << '\n';
        pts.emplace_back(static_cast<double>(k + 1), m.p_left[k]);
        lo = std::min(lo, m.p_left[k]);
        hi = std::max(hi, m.p_left[k]);
    }
    const double pad = std::max(0.01, 0.1 * (hi - lo));
    SvgPlot plot("Largest probability of a leftward walk", "trials n", "p_left,max(n)", 0.5,
                 static_cast<double>(m.p_left.size()) + 0.5, lo - pad, hi + pad);
    plot.line(pts, "#2471a3");
    for (const auto& [x, y] : pts) plot.marker(x, y, "#2471a3");
    plot.marker(static_cast<double>(m.argmax_n), m.B, "#c0392b", "B = " + fmt("%.4f", m.B));
    plot.save((dir / "p_left.svg").string());
}

}  // namespace

// ================================================================ cosmo

int cmd_cosmo(const Common& c, const CosmoOptions& o, std::ostream& out) {
    Context ctx = open_context(c);
    double z_a = 0, z_b = 0, alpha = 0;
    std::string label = "custom";
    if (!o.pair.empty()) {
        const auto& p = ctx.cfg.pair(o.pair);
        z_a = p.a.z;
        z_b = p.b.z;
        alpha = cosmo::angular_separation(p.a.ra_deg, p.a.dec_deg, p.b.ra_deg, p.b.dec_deg);
        label = p.name;
    } else if (!(o.z_a && o.z_b && o.alpha_deg)) {
        throw UsageError("cosmo needs --pair or all of --za, --zb, --alpha");
    }
    if (o.z_a) z_a = *o.z_a;
    if (o.z_b) z_b = *o.z_b;
    if (o.alpha_deg) alpha = *o.alpha_deg;
    if (z_a < 0 || z_b < 0) throw DomainError("redshifts must be >= 0");
    if (alpha < 0 || alpha > 180) throw DomainError("angular separation must be within [0, 180] degrees");

    const cosmo::Cosmology cos(ctx.cfg.cosmology);
    const auto& p = cos.params();
    const auto lp = cosmo::LightconePair::from_redshifts(z_a, z_b, alpha, p);
    const auto cc = cos.latest_common_cause(lp);
    const auto vol = cos.volumes(lp);

    json j = header(ctx, "cosmo", label + fmt("|%.17g", z_a) + fmt("|%.17g", z_b) + fmt("|%.17g", alpha));
    j["cosmology"] = json::parse(p.to_json());
    j["pair"] = label;
    j["z_a"] = z_a;
    j["z_b"] = z_b;
    j["alpha_deg"] = alpha;
    j["hubble_time_gyr"] = p.hubble_time_gyr();
    j["eta0"] = cos.eta0();
    j["eta_a"] = lp.eta_a;
    j["eta_b"] = lp.eta_b;
    j["chi_a"] = lp.chi_a;
    j["chi_b"] = lp.chi_b;
    j["chi_L"] = cosmo::chi_separation(lp);
    j["t_lb_a_gyr"] = cosmo::lookback_time_of_z(z_a, p);
    j["t_lb_b_gyr"] = cosmo::lookback_time_of_z(z_b, p);
    j["common_cause"] = {{"exists", cc.exists}, {"eta_ab", cc.eta_ab}, {"t_lb_ab_gyr", num(cc.lookback_gyr)}};
    j["volumes"] = {{"v0", vol.v0},         {"v_a", vol.v_a},         {"v_b", vol.v_b},
                    {"v_i", vol.v_i},       {"frac_a", vol.frac_a},   {"frac_b", vol.frac_b},
                    {"frac_i", vol.frac_i}, {"f_excl", vol.f_excl}};
    j["f_excl"] = vol.f_excl;
    json warnings = json::array();
    if (vol.f_excl <= 0) warnings.push_back("no exclusion: the emission events add nothing outside the experiment's past");
    j["warnings"] = warnings;
    write_json(ctx.out / "cosmo_report.json", j);
    lightcone_plots(cos, lp, cc, o.samples, ctx.out);
    if (!c.quiet) {
        out << label << ": eta0=" << fmt("%.4f", cos.eta0()) << " t_lb(A)=" << fmt("%.3f", j["t_lb_a_gyr"].get<double>())
            << " Gyr t_lb(B)=" << fmt("%.3f", j["t_lb_b_gyr"].get<double>()) << " Gyr";
        if (cc.exists) out << " t_lb(AB)=" << fmt("%.3f", cc.lookback_gyr) << " Gyr";
        out << " F_excl=" << fmt("%.4f", vol.f_excl) << '\n';
        for (const auto& w : warnings) out << "warning: " << w.get<std::string>() << '\n';
    }
    return ok;
}

// ================================================================ windows

int cmd_windows(const Common& c, const WindowsOptions& o, std::ostream& out) {
    Context ctx = open_context(c);
    const auto& p = ctx.cfg.pair(o.pair);
    const auto& st = ctx.cfg.stations;
    auto make_track = [&](const config::QuasarSpec& q, const geom::SitePosition& site) {
        if (!o.from_radec && q.az_deg && q.alt_deg)
            return geom::SkyTrack::from_start_azalt(*q.az_deg, *q.alt_deg, site, p.start, p.duration_min, o.cadence_min);
        return geom::SkyTrack::from_radec(q.ra_deg, q.dec_deg, site, p.start, p.duration_min, o.cadence_min);
    };
    const auto track_a = make_track(p.a, st.receiver_a);
    const auto track_b = make_track(p.b, st.receiver_b);
    const auto wa = geom::tau_valid(geom::Side::A, track_a, st, ctx.cfg.delays_a);
    const auto wb = geom::tau_valid(geom::Side::B, track_b, st, ctx.cfg.delays_b);

    json j = header(ctx, "windows", p.name + (o.from_radec ? "|radec" : "|azalt") + fmt("|%.17g", o.cadence_min));
    j["pair"] = p.name;
    j["track_source"] = (!o.from_radec && p.a.az_deg) ? "start_azalt" : "radec";
    json sides = json::object();
    for (const auto& [name, w, d] : {std::tuple{"A", &wa, &ctx.cfg.delays_a}, std::tuple{"B", &wb, &ctx.cfg.delays_b}}) {
        sides[name] = {{"tau_geom_min_us", w->tau_geom_min_us},
                       {"tau_set_ns", d->tau_set_ns},
                       {"tau_buffer_ns", d->tau_buffer_ns},
                       {"tau_valid_us", w->tau_valid_us},
                       {"in_alignment", w->in_alignment}};
    }
    if (p.tau_geom_us) {
        sides["A"]["published_tau_geom_us"] = (*p.tau_geom_us)[0];
        sides["B"]["published_tau_geom_us"] = (*p.tau_geom_us)[1];
        sides["A"]["tau_valid_from_published_us"] = geom::tau_valid_from_components((*p.tau_geom_us)[0], ctx.cfg.delays_a);
        sides["B"]["tau_valid_from_published_us"] = geom::tau_valid_from_components((*p.tau_geom_us)[1], ctx.cfg.delays_b);
    }
    j["sides"] = sides;
    json warnings = json::array();
    if (!wa.in_alignment) warnings.push_back("side A out of causal alignment (tau_valid <= 0)");
    if (!wb.in_alignment) warnings.push_back("side B out of causal alignment (tau_valid <= 0)");
    j["warnings"] = warnings;
    write_json(ctx.out / "windows.json", j);

    std::ofstream csv(ctx.out / "windows.csv");
    csv << "utc,az_a,alt_a,tau_geom_a_us,tau_valid_a_us,az_b,alt_b,tau_geom_b_us,tau_valid_b_us\n";
    csv.precision(8);
    for (std::size_t k = 0; k < track_a.samples.size() && k < track_b.samples.size(); ++k) {
        const auto& sa = track_a.samples[k];
        const auto& sb = track_b.samples[k];
        csv << geom::format_utc(sa.utc) << ',' << sa.az_deg << ',' << sa.alt_deg << ',' << wa.tau_geom_us[k] << ','
            << geom::tau_valid_from_components(wa.tau_geom_us[k], ctx.cfg.delays_a) << ',' << sb.az_deg << ',' << sb.alt_deg
            << ',' << wb.tau_geom_us[k] << ',' << geom::tau_valid_from_components(wb.tau_geom_us[k], ctx.cfg.delays_b) << '\n';
    }
    if (!c.quiet) {
        out << p.name << ": tau_geom min A=" << fmt("%.3f", wa.tau_geom_min_us) << " us B=" << fmt("%.3f", wb.tau_geom_min_us)
            << " us; tau_valid A=" << fmt("%.3f", wa.tau_valid_us) << " us B=" << fmt("%.3f", wb.tau_valid_us) << " us\n";
        for (const auto& w : warnings) out << "warning: " << w.get<std::string>() << '\n';
    }
    return ok;
}

// ================================================================ analyze

int cmd_analyze(const Common& c, const AnalyzeOptions& o, std::ostream& out) {
    Context ctx = open_context(c);
    const auto& acfg = ctx.cfg.analysis;
    auto pick = [&](const std::string& opt, const std::optional<std::string>& fromcfg) -> std::string {
        if (!opt.empty()) return opt;
        return fromcfg ? ctx.cfg.resolve(*fromcfg) : std::string{};
    };
    std::string counts_path = o.counts, events_path = o.events, trials_path = o.trials;
    if (counts_path.empty() && events_path.empty() && trials_path.empty()) {
        counts_path = pick("", acfg.counts);
        events_path = pick("", acfg.events);
        trials_path = pick("", acfg.trials);
    }
    const int modes = !counts_path.empty() + !events_path.empty() + !trials_path.empty();
    if (modes != 1) throw UsageError("analyze needs exactly one of --counts, --events or --trials");

    json j;
    chsh::CoincidenceCounts counts;
    std::string mode;
    json pipeline_json;
    if (!counts_path.empty()) {
        mode = "counts";
        ctx.inputs.push_back(counts_path);
        counts = chsh::read_counts_csv(counts_path);
    } else if (!trials_path.empty()) {
        mode = "trials";
        ctx.inputs.push_back(trials_path);
        const auto trials = events::read_trials_jsonl(trials_path);
        counts = chsh::tabulate(trials);
    } else {
        mode = "events";
        ctx.inputs.push_back(events_path);
        const auto ev = events::read_events(events_path);
        const auto tv = tau_valid_for(ctx, o);
        events::PipelineOptions popt;
        popt.delays_a = ctx.cfg.delays_a;
        popt.delays_b = ctx.cfg.delays_b;
        popt.tau_valid_a_us = tv[0];
        popt.tau_valid_b_us = tv[1];
        popt.window = acfg.window;
        if (o.window_ns) popt.window.width_ns = *o.window_ns;
        if (o.window_convention == "half_width") popt.window.convention = events::WindowConvention::half_width;
        if (o.window_convention == "full_width") popt.window.convention = events::WindowConvention::full_width;
        if (o.estimate_drift || acfg.estimate_drift) popt.drift = events::DriftOptions{};
        const auto res = events::run_pipeline(events::split_streams(ev), popt);
        counts = chsh::tabulate(res.gated.trials);
        events::write_trials_jsonl((ctx.out / "trials.jsonl").string(), res.gated.trials);
        pipeline_json = {{"tau_valid_us", tv},
                         {"window_max_separation_ps", popt.window.max_separation_ps()},
                         {"coincidences", res.gated.duty.coincidences},
                         {"trials", res.gated.duty.trials},
                         {"session_s", res.gated.duty.session_s},
                         {"duty_a", res.gated.duty.duty_a},
                         {"duty_b", res.gated.duty.duty_b},
                         {"joint_duty", res.gated.duty.joint_duty},
                         {"drift_slope", res.drift.slope()},
                         {"drift_offsets_ps", res.drift.offsets_ps}};
        json w = json::array();
        for (const auto* s : {&res.intervals_a, &res.intervals_b})
            if (s->warning) w.push_back(*s->warning);
        pipeline_json["warnings"] = w;
    }

    // Predictability: override file, config override, then rates.
    std::optional<signif::EpsilonInputs> eps;
    std::optional<predict::PredictabilityTable> table;
    std::string eps_source;
    if (!o.eps_file.empty()) {
        ctx.inputs.push_back(o.eps_file);
        eps = read_eps_file(o.eps_file);
        eps_source = "override file";
    } else if (acfg.eps_override && o.rates.empty()) {
        eps = acfg.eps_override;
        eps_source = "config override";
    } else {
        const std::string rates = pick(o.rates, acfg.rates);
        if (rates.empty()) throw UsageError("analyze needs --rates or a predictability override (--eps)");
        ctx.inputs.push_back(rates);
        table = predict::excess_predictability(predict::read_rates_csv(rates));
        eps = signif::EpsilonInputs::from_table(*table);
        eps_source = table->average_based ? "rates (average-based)" : "rates (per-port maxima)";
    }

    const auto corr = chsh::correlations(counts);
    const auto indep = chsh::settings_independence(counts);
    const auto ns = chsh::no_signaling(counts);
    signif::MemoryBoundOptions mem = acfg.memory;
    if (o.n_max) mem.n_max = *o.n_max;
    if (o.memory_model == "adaptive") mem.model = signif::PlanModel::adaptive;
    if (o.memory_model == "committed") mem.model = signif::PlanModel::committed;
    const auto rep = signif::analyze({counts, *eps}, mem);

    std::string opts = mode + "|" + eps_source + "|" + std::to_string(mem.n_max) +
                       (mem.model == signif::PlanModel::adaptive ? "|adaptive" : "|committed");
    j = header(ctx, "analyze", opts);
    j["input_mode"] = mode;
    if (!pipeline_json.is_null()) j["pipeline"] = pipeline_json;
    j["counts"] = counts_json(counts);
    j["N"] = counts.total();
    j["chsh"] = {{"p_equal", corr.p_equal}, {"E", corr.E}, {"C", corr.C}, {"S", corr.S}, {"V", corr.V}};
    j["independence"] = {{"q", indep.q}, {"p_a", indep.p_a}, {"p_b", indep.p_b}, {"chi2", indep.chi2},
                         {"dof", indep.dof}, {"p_value", indep.p_value}};
    json tests = json::array();
    for (const auto& t : ns.tests)
        tests.push_back({{"label", t.label}, {"p1", t.p1}, {"p2", t.p2}, {"z", t.z}, {"p_value", t.p_value}});
    j["no_signaling"] = {{"p_a_plus", ns.p_a_plus}, {"p_b_plus", ns.p_b_plus}, {"tests", tests},
                         {"min_p", ns.min_p}, {"aggregate_p", ns.aggregate_p}};
    json pj = {{"source", eps_source}, {"eps_ij", eps->eps_ij}, {"eps_a", eps->eps_a}, {"eps_b", eps->eps_b},
               {"sigma_a", eps->sigma_a}, {"sigma_b", eps->sigma_b}};
    const auto vc = predict::visibility_constraint(std::min(1.0, corr.V));
    double eps_max = 0;
    for (double e : eps->eps_ij) eps_max = std::max(eps_max, e);
    pj["visibility_threshold"] = vc.threshold;
    pj["eps_below_threshold"] = eps_max < vc.threshold;
    if (table) pj["eps_max"] = {{"value", table->eps_max.value}, {"sigma", table->eps_max.sigma}};
    j["predictability"] = pj;
    j["significance"] = {
        {"N_win", rep.wins},
        {"q", rep.q},
        {"W", rep.W},
        {"W_expected", rep.expected.expected_W},
        {"eps_bar", rep.expected.eps_bar},
        {"f_opt", rep.f_opt.f},
        {"f_opt_clamped", rep.f_opt.clamped},
        {"sigma_W_opt", rep.sigma_W_opt},
        {"nu_bar", rep.nu.nu_bar},
        {"delta_nu", rep.nu.delta_nu},
        {"nu_n", rep.nu.nu_n},
        {"p_cond", rep.nu.p_cond},
        {"log10_p_cond", rep.nu.log10_p_cond},
        {"p_no_mem", rep.nu.p_no_mem},
        {"log10_p_no_mem", rep.nu.log10_p_no_mem},
        {"nu_no_mem", rep.nu.nu_no_mem},
        {"B", rep.memory.B},
        {"B_argmax_n", rep.memory.argmax_n},
        {"memory_model", rep.memory.model == signif::PlanModel::adaptive ? "adaptive" : "committed"},
        {"p_left_max", rep.memory.p_left},
        {"grid_fallback", rep.memory.grid_fallback},
        {"grid_error_bound", rep.memory.error_bound},
        {"p", rep.final.p},
        {"log10_p", rep.final.log10_p},
        {"nu", rep.final.nu},
        {"violation", rep.violation}};
    json warnings = json::array();
    if (rep.f_opt.clamped) warnings.push_back("negative f_opt entries: simplex projection applied; sigma_W_opt uses the unclamped closed form");
    if (!rep.violation) warnings.push_back("no violation: W does not exceed its local-realist expectation");
    if (!(eps_max < vc.threshold)) warnings.push_back("excess predictability above V*sqrt2-1: no violation possible");
    j["warnings"] = warnings;
    write_json(ctx.out / "analysis.json", j);
    p_left_plot(rep.memory, ctx.out);

    if (!c.quiet) {
        out << "N=" << counts.total() << " S=" << fmt("%.4f", corr.S) << " V=" << fmt("%.4f", corr.V)
            << " chi2=" << fmt("%.4f", indep.chi2) << " (p=" << fmt("%.3f", indep.p_value) << ")"
            << " no-signaling aggregate p=" << fmt("%.3f", ns.aggregate_p) << '\n';
        out << "W=" << fmt("%.1f", rep.W) << " <W>=" << fmt("%.1f", rep.expected.expected_W)
            << " sigma=" << fmt("%.3f", rep.sigma_W_opt) << " nu_n=" << fmt("%.3f", rep.nu.nu_n) << " B=" << fmt("%.4f", rep.memory.B)
            << " p=" << fmt("%.3e", rep.final.p) << " (log10 " << fmt("%.3f", rep.final.log10_p) << ") nu=" << fmt("%.3f", rep.final.nu)
            << '\n';
        for (const auto& w : warnings) out << "warning: " << w.get<std::string>() << '\n';
    }
    return ok;
}

// ================================================================ simulate

int cmd_simulate(const Common& c, const SimulateOptions& o, std::ostream& out) {
    Context ctx = open_context(c);
    sim::SimConfig s = ctx.cfg.simulation;
    if (o.seed) s.seed = *o.seed;
    if (o.visibility) s.visibility = *o.visibility;
    if (o.duration_s) s.duration_s = *o.duration_s;
    if (o.target_trials) s.target_trials = *o.target_trials;
    if (o.mode == "full") s.mode = sim::GenerationMode::full;
    if (o.mode == "gated") s.mode = sim::GenerationMode::gated;

    const auto res = sim::simulate_trials(s);
    const fs::path ev = ctx.out / (o.format == "csv" ? "events.csv" : "events.bin");
    if (o.format == "csv") events::write_events_csv(ev.string(), res.events);
    else events::write_events_binary(ev.string(), res.events);

    std::string opts = "seed=" + std::to_string(s.seed) + fmt("|V=%.17g", s.visibility) + fmt("|T=%.17g", s.duration_s) +
                       (s.mode == sim::GenerationMode::full ? "|full" : "|gated") + "|" + o.format;
    json j = header(ctx, "simulate", opts);
    j["seed"] = s.seed;
    j["visibility"] = s.visibility;
    j["duration_s"] = s.duration_s;
    j["mode"] = s.mode == sim::GenerationMode::full ? "full" : "gated";
    j["pair_rate_cps"] = res.pair_rate_cps;
    j["pairs_generated"] = res.pairs_generated;
    j["joint_valid_s"] = static_cast<double>(res.joint_valid_ps) * 1e-12;
    j["events"] = res.events.size();
    j["event_file"] = ev.filename().string();
    j["event_file_sha256"] = input_digest({ev.string()});
    j["tau_valid_us"] = {s.tau_valid_a_us, s.tau_valid_b_us};
    if (o.check) {
        const auto e2e = sim::end_to_end_check(s);
        j["check"] = {{"S", e2e.correlations.S},
                      {"V", e2e.correlations.V},
                      {"trials", e2e.duty.trials},
                      {"duty_a", e2e.duty.duty_a},
                      {"duty_b", e2e.duty.duty_b},
                      {"joint_duty", e2e.duty.joint_duty},
                      {"chi2_p", e2e.independence.p_value},
                      {"no_signaling_aggregate_p", e2e.no_signaling.aggregate_p},
                      {"log10_p", e2e.significance.final.log10_p},
                      {"nu", e2e.significance.final.nu},
                      {"visibility_ok", e2e.visibility_ok},
                      {"independence_ok", e2e.independence_ok},
                      {"no_signaling_ok", e2e.no_signaling_ok},
                      {"violation", e2e.violation}};
    }
    write_json(ctx.out / "sim_report.json", j);
    if (!c.quiet) {
        out << "wrote " << res.events.size() << " events to " << ev.string() << " (pairs " << res.pairs_generated
            << ", pair rate " << fmt("%.4g", res.pair_rate_cps) << " cps)\n";
        if (o.check) {
            out << "check: S=" << fmt("%.4f", j["check"]["S"].get<double>()) << " trials=" << j["check"]["trials"].get<std::size_t>()
                << " log10 p=" << fmt("%.2f", j["check"]["log10_p"].get<double>()) << '\n';
        }
    }
    return ok;
}

// ================================================================ schedule

int cmd_schedule(const Common& c, const ScheduleOptions& o, std::ostream& out) {
    Context ctx = open_context(c);
    ctx.inputs.push_back(o.catalog);
    const auto all = sched::read_catalog_csv(o.catalog);
    const auto kept = o.no_filter ? all : sched::filter_catalog(all, o.mag_limit, o.patch_deg);
    sched::ScheduleSetup setup;
    setup.stations = ctx.cfg.stations;
    setup.delays_a = ctx.cfg.delays_a;
    setup.delays_b = ctx.cfg.delays_b;
    if (!o.start.empty()) setup.start = geom::parse_utc(o.start);
    else if (!ctx.cfg.pairs.empty()) setup.start = ctx.cfg.pairs.front().start;
    else throw UsageError("schedule needs --start");
    if (o.duration_min) setup.duration_min = *o.duration_min;
    if (kept.size() < 2) throw DataError("fewer than two catalog entries survive the filter");
    const cosmo::Cosmology cos(ctx.cfg.cosmology);
    const auto scores = sched::score_pairs(kept, setup, cos);
    sched::write_scores_csv((ctx.out / "schedule.csv").string(), scores);

    json j = header(ctx, "schedule", geom::format_utc(setup.start) + fmt("|%.17g", setup.duration_min) +
                                         fmt("|%.17g", o.mag_limit) + fmt("|%.17g", o.patch_deg) + (o.no_filter ? "|nofilter" : ""));
    j["catalog_entries"] = all.size();
    j["after_filter"] = kept.size();
    j["window_start"] = geom::format_utc(setup.start);
    j["window_minutes"] = setup.duration_min;
    j["expected_nu_note"] = "heuristic: scales with sqrt(trials); not a reproduction of any published simulation";
    json arr = json::array();
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const auto& s = scores[k];
        arr.push_back({{"rank", k + 1},
                       {"id_a", s.id_a},
                       {"id_b", s.id_b},
                       {"alpha_deg", s.alpha_deg},
                       {"f_excl", s.f_excl},
                       {"min_snr", s.min_snr},
                       {"minutes", s.minutes},
                       {"valid_minutes", s.valid_minutes},
                       {"min_tau_valid_a_us", s.min_tau_valid_a_us},
                       {"min_tau_valid_b_us", s.min_tau_valid_b_us},
                       {"nu_per_minute", s.nu_per_minute},
                       {"expected_nu", s.expected_nu}});
    }
    j["pairs"] = arr;
    write_json(ctx.out / "schedule.json", j);
    if (!c.quiet) {
        out << all.size() << " entries, " << kept.size() << " after filtering, " << scores.size() << " feasible pairs\n";
        for (std::size_t k = 0; k < std::min<std::size_t>(5, scores.size()); ++k) {
            out << "  " << k + 1 << ". " << scores[k].id_a << " / " << scores[k].id_b << " F_excl=" << fmt("%.4f", scores[k].f_excl)
                << " minutes=" << scores[k].minutes << '\n';
        }
    }
    return ok;
}

// ================================================================ randomness

int cmd_randomness(const Common& c, const RandomnessOptions& o, std::ostream& out) {
    Context ctx = open_context(c);
    ctx.inputs.push_back(o.bits);
    const auto bs = randbits::read_bitstream(o.bits);
    const int m = o.m ? *o.m : randbits::choose_m(bs.size());
    const auto mi = randbits::mutual_information(bs.bits, m, o.start);
    json j = header(ctx, "randomness", "m=" + std::to_string(m) + (o.start ? "|start=" + std::to_string(*o.start) : ""));
    j["length"] = bs.size();
    j["m"] = m;
    j["m_from_length"] = !o.m.has_value();
    j["samples"] = mi.samples;
    j["mutual_information_bits"] = mi.estimate;
    j["plug_in_bits"] = mi.plug_in;
    j["bias_correction_bits"] = mi.correction;
    j["occupied_joint_bins"] = mi.occupied_joint;
    j["occupied_contexts"] = mi.occupied_context;
    write_json(ctx.out / "randomness.json", j);
    if (!c.quiet) out << "L=" << bs.size() << " m=" << m << " I=" << fmt("%.3e", mi.estimate) << " bits (plug-in " << fmt("%.3e", mi.plug_in) << ")\n";
    return ok;
}

}  // namespace cosmicbell::cli
