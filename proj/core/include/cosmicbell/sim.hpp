#pragma once

#include "cosmicbell/chsh.hpp"
#include "cosmicbell/events.hpp"
#include "cosmicbell/predict.hpp"
#include "cosmicbell/signif.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cosmicbell::sim {

// SplitMix64 evaluated at (seed, stream, counter): any draw is addressable without replaying the others.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)
    double exponential(double rate);
    double normal();
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Plus-direction polarizer angles per setting (deg).
struct AngleSet {
    std::array<double, 2> alice{22.5, 157.5};
    std::array<double, 2> bob{0.0, 45.0};
};

enum class GenerationMode {
    full,   // pairs over the whole session
    gated,  // pairs only inside jointly valid setting windows; same statistics for gated trials
};

struct SimConfig {
    double visibility = 0.935;
    double pair_rate_cps = 1.0e5;
    std::optional<double> target_trials;  // gated mode: pick the pair rate to expect this many trials
    double heralding_a = 0.31;
    double heralding_b = 0.41;
    predict::RateMeasurement crng;
    geom::ChannelDelays delays_a;
    geom::ChannelDelays delays_b;
    double tau_valid_a_us = 2.34;
    double tau_valid_b_us = 0.90;
    AngleSet angles;
    double duration_s = 60.0;
    std::uint64_t seed = 1;
    GenerationMode mode = GenerationMode::gated;
    double jitter_ps = 100.0;       // rms per detection
    double pol_dark_cps = 0.0;      // per polarization detector
    double dead_time_ns = 0.0;
    double clock_offset_ps = 0.0;   // added to every side-B timestamp
    double clock_drift = 0.0;       // dimensionless rate error of the side-B clock

    void validate() const;
    // Published pair-1 station parameters.
    static SimConfig pair1_defaults();
};

struct SimResult {
    std::vector<events::EventRecord> events;  // all channels, time ordered
    double pair_rate_cps = 0;
    std::uint64_t pairs_generated = 0;
    std::uint64_t joint_valid_ps = 0;
    std::uint64_t session_ps = 0;
};

std::vector<events::EventRecord> simulate_poisson(events::Channel ch, double rate_cps, double duration_s,
                                                  std::uint64_t seed, std::uint64_t stream);

std::vector<events::EventRecord> simulate_crng_stream(const predict::SideRates& rates, geom::Side side,
                                                      double duration_s, std::uint64_t seed);

// Equal-outcome probability for plus angles theta_a, theta_b (deg).
double p_equal(double visibility, double theta_a_deg, double theta_b_deg);

SimResult simulate_trials(const SimConfig& cfg);

struct EndToEndReport {
    events::DutyReport duty;
    chsh::CoincidenceCounts counts;
    chsh::CorrelationReport correlations;
    chsh::SettingsStats independence;
    chsh::NoSignalingReport no_signaling;
    predict::PredictabilityTable predictability;
    signif::SignificanceReport significance;
    bool visibility_ok = false;
    bool independence_ok = false;
    bool no_signaling_ok = false;
    bool violation = false;
};

// events -> chsh -> predict -> signif on a simulated session. Failures name the stage.
EndToEndReport end_to_end_check(const SimConfig& cfg, const std::optional<signif::EpsilonInputs>& eps_override = {},
                                const signif::MemoryBoundOptions& mem = {});

}  // namespace cosmicbell::sim
