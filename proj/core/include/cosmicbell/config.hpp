#pragma once

#include "cosmicbell/cosmo.hpp"
#include "cosmicbell/events.hpp"
#include "cosmicbell/geom.hpp"
#include "cosmicbell/signif.hpp"
#include "cosmicbell/sim.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cosmicbell::config {

inline constexpr int kSchemaVersion = 1;

struct QuasarSpec {
    std::string id;
    double ra_deg = 0;
    double dec_deg = 0;
    double z = 0;
    std::optional<double> az_deg;  // pointing at the window start
    std::optional<double> alt_deg;
};

struct PairSpec {
    std::string name;
    QuasarSpec a;
    QuasarSpec b;
    geom::UtcTime start{};
    double duration_min = 0;
    std::optional<std::array<double, 2>> tau_geom_us;  // published minimum, A and B
};

struct AnalysisSpec {
    std::optional<std::string> events;
    std::optional<std::string> counts;
    std::optional<std::string> trials;
    std::optional<std::string> rates;
    std::optional<signif::EpsilonInputs> eps_override;
    std::optional<std::string> pair;  // name used for tau_valid
    std::optional<std::array<double, 2>> tau_valid_us;
    events::CoincidenceWindow window;
    bool estimate_drift = false;
    signif::MemoryBoundOptions memory;
};

struct RunConfig {
    cosmo::CosmologyParams cosmology;
    geom::Stations stations;
    geom::ChannelDelays delays_a;
    geom::ChannelDelays delays_b;
    std::vector<PairSpec> pairs;
    AnalysisSpec analysis;
    sim::SimConfig simulation;
    std::string output_dir = "out";
    std::string base_dir = ".";  // relative paths resolve against this

    const PairSpec& pair(const std::string& name) const;
    std::string resolve(const std::string& path) const;
    void validate() const;

    static RunConfig defaults();
    static RunConfig from_json(const std::string& text, const std::string& base_dir = ".");
    static RunConfig load(const std::string& path);
};

std::string to_json(const signif::EpsilonInputs& e);

// Environment variable consulted when no --config is given.
inline constexpr const char* kConfigEnv = "COSMICBELL_CONFIG";

}  // namespace cosmicbell::config
