#pragma once

#include "cosmicbell/errors.hpp"
#include "cosmicbell/geom.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cosmicbell::events {

using geom::Side;

// Numeric codes are the on-disk byte in the binary format.
enum class Channel : std::uint8_t {
    a_red = 0,
    a_blue = 1,
    a_plus = 2,
    a_minus = 3,
    b_red = 4,
    b_blue = 5,
    b_plus = 6,
    b_minus = 7,
};

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);
Side channel_side(Channel c);
bool is_crng(Channel c);
int crng_setting(Channel c);  // red -> 1, blue -> 2
int pol_outcome(Channel c);   // plus -> +1, minus -> -1

struct EventRecord {
    std::uint64_t t_ps = 0;
    Channel channel = Channel::a_red;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// CSV: header "channel,timestamp_ps", then one "<name>,<uint64>" per line.
std::vector<EventRecord> read_events_csv(const std::string& path);
void write_events_csv(const std::string& path, std::span<const EventRecord> events);
// Binary: 9-byte records, u8 channel code then u64 little-endian picoseconds. No header.
std::vector<EventRecord> read_events_binary(const std::string& path);
void write_events_binary(const std::string& path, std::span<const EventRecord> events);
std::vector<EventRecord> parse_events_binary(std::span<const std::uint8_t> bytes);
// Dispatch on extension: ".csv" is text, anything else binary.
std::vector<EventRecord> read_events(const std::string& path);

struct SideStreams {
    std::vector<EventRecord> crng;
    std::vector<EventRecord> pol;
};
struct SessionStreams {
    SideStreams a;
    SideStreams b;
};

// Stable time sort per side; input order across channels is irrelevant.
SessionStreams split_streams(std::span<const EventRecord> events);

// ---- clock drift ----

struct DriftModel {
    std::int64_t origin_ps = 0;
    std::int64_t block_ps = 10'000'000'000'000;
    std::vector<double> offsets_ps;  // offset at each block centre

    // Piecewise-linear offset to add to a side-B timestamp; constant outside the nodes.
    double offset_at(std::int64_t t_b) const;
    std::int64_t apply(std::uint64_t t_b) const;
    // Mean slope over the session, dimensionless.
    double slope() const;
    bool is_zero() const;
    void validate() const;
    DriftModel negated() const;
};

struct DriftOptions {
    double window_scan_ns = 2000.0;
    double block_s = 10.0;
    double coarse_bin_ps = 1000.0;
    double fine_bin_ps = 20.0;
    double min_peak_ratio = 5.0;
};

struct NoLockError : DataError {
    using DataError::DataError;
};

DriftModel estimate_clock_drift(std::span<const std::uint64_t> t_a, std::span<const std::uint64_t> t_b,
                                const DriftOptions& opt = {});

// ---- coincidences ----

enum class WindowConvention { full_width, half_width };

struct CoincidenceWindow {
    double width_ns = 2.66;
    WindowConvention convention = WindowConvention::full_width;

    // |t_A - t_B| <= this, in ps.
    std::int64_t max_separation_ps() const;
};

struct Coincidence {
    std::size_t ia = 0;  // index into the side-A stream
    std::size_t ib = 0;

    friend bool operator==(const Coincidence&, const Coincidence&) = default;
};

// Greedy earliest-first matching on already aligned timestamps.
std::vector<Coincidence> find_coincidences(std::span<const std::int64_t> t_a, std::span<const std::int64_t> t_b,
                                           const CoincidenceWindow& w = {});
// Applies the drift model to side B first.
std::vector<Coincidence> find_coincidences(std::span<const EventRecord> pol_a, std::span<const EventRecord> pol_b,
                                           const DriftModel& drift, const CoincidenceWindow& w = {});

// ---- setting validity ----

struct SettingInterval {
    Side side = Side::A;
    int setting = 1;
    std::uint64_t t_start = 0;  // ps, inclusive
    std::uint64_t t_end = 0;    // ps, exclusive

    friend bool operator==(const SettingInterval&, const SettingInterval&) = default;
};

struct IntervalSet {
    std::vector<SettingInterval> intervals;
    std::optional<std::string> warning;

    std::uint64_t total_ps() const;
};

IntervalSet build_setting_intervals(std::span<const EventRecord> crng_events, Side side,
                                    const geom::ChannelDelays& delays, double tau_valid_us);

struct TrialRecord {
    std::uint64_t t_a = 0;
    std::uint64_t t_b = 0;
    int setting_a = 1;
    int setting_b = 1;
    int outcome_a = 1;
    int outcome_b = 1;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct DutyReport {
    double session_s = 0;
    double duty_a = 0;
    double duty_b = 0;
    double joint_duty = 0;  // measure of A-valid and B-valid overlap / session
    std::size_t coincidences = 0;
    std::size_t trials = 0;
};

struct GateResult {
    std::vector<TrialRecord> trials;
    DutyReport duty;
};

// session_ps of 0 means "span of the intervals".
GateResult gate_and_label(std::span<const Coincidence> coincidences, std::span<const EventRecord> pol_a,
                          std::span<const EventRecord> pol_b, const IntervalSet& intervals_a,
                          const IntervalSet& intervals_b, std::uint64_t session_ps = 0);

void write_trials_jsonl(const std::string& path, std::span<const TrialRecord> trials);
std::vector<TrialRecord> read_trials_jsonl(const std::string& path);

// ---- whole pipeline ----

struct PipelineOptions {
    geom::ChannelDelays delays_a;
    geom::ChannelDelays delays_b;
    double tau_valid_a_us = 0;
    double tau_valid_b_us = 0;
    CoincidenceWindow window;
    std::optional<DriftOptions> drift;  // empty: assume aligned clocks
    std::uint64_t session_ps = 0;
};

struct PipelineResult {
    DriftModel drift;
    std::vector<Coincidence> coincidences;
    IntervalSet intervals_a;
    IntervalSet intervals_b;
    GateResult gated;
};

PipelineResult run_pipeline(const SessionStreams& streams, const PipelineOptions& opt);

}  // namespace cosmicbell::events
