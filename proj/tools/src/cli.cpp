#include "cosmicbell_cli/cli.hpp"

#include "commands.hpp"
#include "cosmicbell/errors.hpp"
#include "cosmicbell/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ostream>

namespace cosmicbell::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quasar-settings Bell test toolkit"};
    app.set_version_flag("--version", std::string(cosmicbell::version()));
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("-c,--config", common.config_path, "JSON run configuration (default: $COSMICBELL_CONFIG)");
    app.add_option("-o,--out", common.out_dir, "Output directory (default: config output_dir)");
    app.add_flag("-q,--quiet", common.quiet, "Suppress the summary on stdout");

    CosmoOptions co;
    auto* cosmo = app.add_subcommand("cosmo", "Light-cone volumes and excluded fraction for a quasar pair");
    cosmo->add_option("--pair", co.pair, "Pair name from the configuration");
    cosmo->add_option("--za", co.z_a, "Redshift of quasar A (overrides the pair)");
    cosmo->add_option("--zb", co.z_b, "Redshift of quasar B (overrides the pair)");
    cosmo->add_option("--alpha", co.alpha_deg, "Angular separation in degrees (overrides the pair)");
    cosmo->add_option("--samples", co.samples, "Points per light-cone curve")->check(CLI::Range(10, 100000));

    WindowsOptions wo;
    auto* windows = app.add_subcommand("windows", "Causal-alignment windows tau_geom(t) and tau_valid");
    windows->add_option("--pair", wo.pair, "Pair name from the configuration");
    windows->add_option("--cadence", wo.cadence_min, "Sampling cadence in minutes")->check(CLI::PositiveNumber);
    windows->add_flag("--from-radec", wo.from_radec, "Track from RA/Dec instead of the start az/alt");

    AnalyzeOptions ao;
    auto* analyze = app.add_subcommand("analyze", "CHSH, independence, no-signaling and significance report");
    auto* g_counts = analyze->add_option("--counts", ao.counts, "Counts CSV (rows 11,12,21,22)");
    auto* g_events = analyze->add_option("--events", ao.events, "Event file (.csv or binary)");
    auto* g_trials = analyze->add_option("--trials", ao.trials, "Trial JSONL");
    g_counts->excludes(g_events)->excludes(g_trials);
    g_events->excludes(g_trials);
    analyze->add_option("--rates", ao.rates, "Rates CSV for the predictability table");
    analyze->add_option("--eps", ao.eps_file, "JSON predictability override");
    analyze->add_option("--pair", ao.pair, "Pair used for tau_valid when analysing events");
    analyze->add_option("--tau-valid", ao.tau_valid_us, "tau_valid for A and B in microseconds")->expected(2);
    analyze->add_option("--n-max", ao.n_max, "Longest losing-pair plan in the memory bound")->check(CLI::Range(1, 250));
    analyze->add_option("--memory-model", ao.memory_model, "committed or adaptive")->check(CLI::IsMember({"committed", "adaptive"}));
    analyze->add_option("--window", ao.window_ns, "Coincidence window in ns")->check(CLI::PositiveNumber);
    analyze->add_option("--window-convention", ao.window_convention, "full_width or half_width")
        ->check(CLI::IsMember({"full_width", "half_width"}));
    analyze->add_flag("--estimate-drift", ao.estimate_drift, "Estimate the relative clock drift first");

    SimulateOptions so;
    auto* simulate = app.add_subcommand("simulate", "Synthetic session in the event-file formats");
    simulate->add_option("--seed", so.seed, "Generator seed");
    simulate->add_option("--visibility", so.visibility, "Two-photon visibility")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--duration", so.duration_s, "Session length in seconds")->check(CLI::PositiveNumber);
    simulate->add_option("--target-trials", so.target_trials, "Expected gated trials (sets the pair rate)");
    simulate->add_option("--mode", so.mode, "gated or full")->check(CLI::IsMember({"gated", "full"}));
    simulate->add_option("--format", so.format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));
    simulate->add_flag("--check", so.check, "Run the full analysis chain on the simulated session");

    ScheduleOptions sco;
    auto* schedule = app.add_subcommand("schedule", "Rank quasar pairs from a catalog");
    schedule->add_option("--catalog", sco.catalog, "Catalog CSV id,ra,dec,z,rmag")->required();
    schedule->add_option("--start", sco.start, "Window start (UTC, ISO 8601)");
    schedule->add_option("--duration", sco.duration_min, "Window length in minutes")->check(CLI::PositiveNumber);
    schedule->add_option("--mag-limit", sco.mag_limit, "Faintest r magnitude kept");
    schedule->add_option("--patch", sco.patch_deg, "Sky patch size in degrees")->check(CLI::PositiveNumber);
    schedule->add_flag("--no-filter", sco.no_filter, "Skip the brightest-for-distance filter");

    RandomnessOptions ro;
    auto* randomness = app.add_subcommand("randomness", "Mutual information between a bit and its predecessors");
    randomness->add_option("--bits", ro.bits, "Bitstream (packed LSB-first, or ASCII 0/1)")->required();
    randomness->add_option("-m,--context", ro.m, "Context length (default from stream length)")->check(CLI::Range(0, 62));
    randomness->add_option("--start", ro.start, "First predicted bit");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << cosmicbell::version() << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return usage;
    }

    if (common.config_path.empty()) {
        if (const char* env = std::getenv(config::kConfigEnv)) common.config_path = env;
    }
    try {
        if (*cosmo) return cmd_cosmo(common, co, out);
        if (*windows) return cmd_windows(common, wo, out);
        if (*analyze) return cmd_analyze(common, ao, out);
        if (*simulate) return cmd_simulate(common, so, out);
        if (*schedule) return cmd_schedule(common, sco, out);
        if (*randomness) return cmd_randomness(common, ro, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return data_error;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return data_error;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return internal_error;
    }
    return usage;
}

}  // namespace cosmicbell::cli
