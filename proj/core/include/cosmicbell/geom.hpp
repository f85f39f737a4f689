#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

namespace cosmicbell::geom {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
};

using UtcTime = std::chrono::sys_seconds;

// "YYYY-MM-DDTHH:MM[:SS][Z]"
UtcTime parse_utc(const std::string& text);
std::string format_utc(UtcTime t);
double julian_date(UtcTime t);
double gmst_deg(UtcTime t);

struct SitePosition {
    double latitude_deg = 0;
    double longitude_deg = 0;
    double elevation_m = 0;
};

// WGS84 ellipsoid.
Vec3 geodetic_to_geocentric(const SitePosition& site);

// Unit vector toward (az clockwise from north, alt above horizon) in the geocentric frame.
Vec3 direction_from_azalt(double az_deg, double alt_deg, const SitePosition& site);

struct HorizontalCoord {
    double az_deg = 0;
    double alt_deg = 0;
};
struct EquatorialCoord {
    double ra_deg = 0;
    double dec_deg = 0;
};

// Mean sidereal time only; no precession, nutation or refraction.
HorizontalCoord radec_to_azalt(double ra_deg, double dec_deg, const SitePosition& site, UtcTime utc);
EquatorialCoord azalt_to_radec(double az_deg, double alt_deg, const SitePosition& site, UtcTime utc);

struct ChannelDelays {
    double tau_set_ns = 0;
    double tau_buffer_ns = 0;
    double gamma = 1.0;        // group index of the cable between receiver and detector
    double n_air = 1.000293;
    double fiber_delay_ns = 0;  // fixed extra latency on the receiver-detector link

    void validate() const;
};

enum class Side { A, B };
const char* side_name(Side s);

// Receivers r_k, detectors m_k, entangled source s. Detectors default to the receivers.
struct Stations {
    SitePosition receiver_a;
    SitePosition receiver_b;
    SitePosition source;
    Vec3 detector_a{};
    Vec3 detector_b{};
    bool detectors_at_receivers = true;

    Vec3 r(Side k) const;
    Vec3 m(Side k) const;
    Vec3 s() const { return geodetic_to_geocentric(source); }
    const SitePosition& receiver_site(Side k) const { return k == Side::A ? receiver_a : receiver_b; }
};

// Causal-alignment slack for side k viewing direction n_hat, in microseconds.
double tau_geom_us(Side k, const Stations& st, const Vec3& n_hat, const ChannelDelays& delays);

struct TrackSample {
    UtcTime utc;
    double az_deg = 0;
    double alt_deg = 0;
};

struct SkyTrack {
    std::vector<TrackSample> samples;

    void validate() const;

    static SkyTrack from_radec(double ra_deg, double dec_deg, const SitePosition& site, UtcTime start,
                               double duration_min, double cadence_min = 1.0);
    // Integer-degree pointing at the start, carried along at the sidereal rate.
    static SkyTrack from_start_azalt(double az_deg, double alt_deg, const SitePosition& site,
                                     UtcTime start, double duration_min, double cadence_min = 1.0);
    // Columns utc,az,alt with a header line.
    static SkyTrack from_csv(const std::string& path);
};

struct ValidityWindow {
    std::vector<double> tau_geom_us;  // per track sample
    double tau_geom_min_us = 0;
    std::size_t argmin = 0;
    double tau_valid_us = 0;
    bool in_alignment = false;
};

ValidityWindow tau_valid(Side k, const SkyTrack& track, const Stations& st, const ChannelDelays& delays);

// tau_valid from an already minimized tau_geom.
double tau_valid_from_components(double tau_geom_min_us, const ChannelDelays& delays);

}  // namespace cosmicbell::geom
