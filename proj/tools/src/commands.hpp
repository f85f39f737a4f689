#pragma once

#include "cosmicbell/config.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>

namespace cosmicbell::cli {

struct Common {
    std::string config_path;  // empty: defaults
    std::string out_dir;      // empty: from config
    bool quiet = false;
};

struct CosmoOptions {
    std::string pair;
    std::optional<double> z_a, z_b, alpha_deg;
    int samples = 200;
};

struct WindowsOptions {
    std::string pair = "pair1";
    double cadence_min = 1.0;
    bool from_radec = false;  // default: propagate the start az/alt
};

struct AnalyzeOptions {
    std::string counts, events, trials, rates, eps_file, pair;
    std::optional<std::array<double, 2>> tau_valid_us;
    std::optional<int> n_max;
    std::string memory_model;
    std::optional<double> window_ns;
    std::string window_convention;
    bool estimate_drift = false;
};

struct SimulateOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> visibility, duration_s, target_trials;
    std::string mode;
    std::string format = "bin";
    bool check = false;
};

struct ScheduleOptions {
    std::string catalog;
    std::string start;
    std::optional<double> duration_min;
    double mag_limit = 19.0;
    double patch_deg = 5.0;
    bool no_filter = false;
};

struct RandomnessOptions {
    std::string bits;
    std::optional<int> m;
    std::optional<std::size_t> start;
};

int cmd_cosmo(const Common& c, const CosmoOptions& o, std::ostream& out);
int cmd_windows(const Common& c, const WindowsOptions& o, std::ostream& out);
int cmd_analyze(const Common& c, const AnalyzeOptions& o, std::ostream& out);
int cmd_simulate(const Common& c, const SimulateOptions& o, std::ostream& out);
int cmd_schedule(const Common& c, const ScheduleOptions& o, std::ostream& out);
int cmd_randomness(const Common& c, const RandomnessOptions& o, std::ostream& out);

}  // namespace cosmicbell::cli
