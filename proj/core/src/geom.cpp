#include "cosmicbell/geom.hpp"

#include "cosmicbell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cosmicbell::geom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWgs84A = 6378137.0;
constexpr double kWgs84F = 1.0 / 298.257223563;
constexpr double kSiderealDegPerDay = 360.98564736629;

double rad(double d) { return d * kPi / 180.0; }
double deg(double r) { return r * 180.0 / kPi; }
double wrap360(double d) {
    d = std::fmod(d, 360.0);
    return d < 0 ? d + 360.0 : d;
}

struct Enu {
    Vec3 east, north, up;
};

Enu enu_basis(const SitePosition& s) {
    const double la = rad(s.latitude_deg), lo = rad(s.longitude_deg);
    return {{-std::sin(lo), std::cos(lo), 0.0},
            {-std::sin(la) * std::cos(lo), -std::sin(la) * std::sin(lo), std::cos(la)},
            {std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)}};
}

HorizontalCoord hadec_to_azalt(double ha_deg, double dec_deg, double lat_deg) {
    const double h = rad(ha_deg), d = rad(dec_deg), la = rad(lat_deg);
    const double alt = std::asin(std::clamp(std::sin(d) * std::sin(la) + std::cos(d) * std::cos(la) * std::cos(h), -1.0, 1.0));
    const double az = std::atan2(-std::sin(h) * std::cos(d),
                                 std::sin(d) * std::cos(la) - std::cos(d) * std::sin(la) * std::cos(h));
    return {wrap360(deg(az)), deg(alt)};
}

void azalt_to_hadec(double az_deg, double alt_deg, double lat_deg, double& ha_deg, double& dec_deg) {
    const double az = rad(az_deg), alt = rad(alt_deg), la = rad(lat_deg);
    const double dec = std::asin(std::clamp(std::sin(alt) * std::sin(la) + std::cos(alt) * std::cos(la) * std::cos(az), -1.0, 1.0));
    const double ha = std::atan2(-std::sin(az) * std::cos(alt),
                                 std::sin(alt) * std::cos(la) - std::cos(alt) * std::sin(la) * std::cos(az));
    ha_deg = deg(ha);
    dec_deg = deg(dec);
}

std::vector<UtcTime> sample_times(UtcTime start, double duration_min, double cadence_min) {
    if (!(duration_min >= 0.0) || !(cadence_min > 0.0)) throw DomainError("track duration/cadence invalid");
    std::vector<UtcTime> out;
    const auto steps = static_cast<long>(std::floor(duration_min / cadence_min + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        out.push_back(start + std::chrono::seconds(std::lround(k * cadence_min * 60.0)));
    }
    return out;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(dot(*this)); }

UtcTime parse_utc(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double s = 0;
    const int n = std::sscanf(text.c_str(), "%d-%d-%d%*[T ]%d:%d:%lf", &y, &mo, &d, &h, &mi, &s);
    if (n < 5) throw DataError("cannot parse UTC timestamp '" + text + "'");
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw DataError("invalid calendar date '" + text + "'");
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{std::lround(s)};
}

std::string format_utc(UtcTime t) {
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const hh_mm_ss hms{t - day_start};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

double julian_date(UtcTime t) {
    const double unix_s = static_cast<double>(t.time_since_epoch().count());
    return unix_s / 86400.0 + 2440587.5;
}

double gmst_deg(UtcTime t) {
    return wrap360(280.46061837 + kSiderealDegPerDay * (julian_date(t) - 2451545.0));
}

Vec3 geodetic_to_geocentric(const SitePosition& site) {
    if (std::fabs(site.latitude_deg) > 90.0) throw DomainError("latitude must be within [-90, 90]");
    const double e2 = kWgs84F * (2.0 - kWgs84F);
    const double la = rad(site.latitude_deg), lo = rad(site.longitude_deg);
    const double n = kWgs84A / std::sqrt(1.0 - e2 * std::sin(la) * std::sin(la));
    const double h = site.elevation_m;
    return {(n + h) * std::cos(la) * std::cos(lo), (n + h) * std::cos(la) * std::sin(lo),
            (n * (1.0 - e2) + h) * std::sin(la)};
}

Vec3 direction_from_azalt(double az_deg, double alt_deg, const SitePosition& site) {
    const Enu b = enu_basis(site);
    const double az = rad(az_deg), alt = rad(alt_deg);
    Vec3 v = b.east * (std::cos(alt) * std::sin(az)) + b.north * (std::cos(alt) * std::cos(az)) +
             b.up * std::sin(alt);
    return v * (1.0 / v.norm());
}

HorizontalCoord radec_to_azalt(double ra_deg, double dec_deg, const SitePosition& site, UtcTime utc) {
    const double lst = gmst_deg(utc) + site.longitude_deg;
    return hadec_to_azalt(wrap360(lst - ra_deg), dec_deg, site.latitude_deg);
}

EquatorialCoord azalt_to_radec(double az_deg, double alt_deg, const SitePosition& site, UtcTime utc) {
    double ha = 0, dec = 0;
    azalt_to_hadec(az_deg, alt_deg, site.latitude_deg, ha, dec);
    const double lst = gmst_deg(utc) + site.longitude_deg;
    return {wrap360(lst - ha), dec};
}

void ChannelDelays::validate() const {
    if (tau_set_ns < 0 || tau_buffer_ns < 0) throw DomainError("tau_set and tau_buffer must be >= 0");
    if (gamma < 1.0 || n_air < 1.0) throw DomainError("gamma and n_air must be >= 1");
    if (fiber_delay_ns < 0) throw DomainError("fiber_delay must be >= 0");
}

const char* side_name(Side s) { return s == Side::A ? "A" : "B"; }

Vec3 Stations::r(Side k) const { return geodetic_to_geocentric(receiver_site(k)); }

Vec3 Stations::m(Side k) const {
    if (detectors_at_receivers) return r(k);
    return k == Side::A ? detector_a : detector_b;
}

double tau_geom_us(Side k, const Stations& st, const Vec3& n_hat, const ChannelDelays& delays) {
    const Side l = k == Side::A ? Side::B : Side::A;
    const Vec3 rk = st.r(k), mk = st.m(k), ml = st.m(l), s = st.s();
    const double t = n_hat.dot(rk - ml) / kSpeedOfLight +
                     delays.n_air * ((mk - s).norm() - (ml - s).norm()) / kSpeedOfLight -
                     delays.gamma * (rk - mk).norm() / kSpeedOfLight - delays.fiber_delay_ns * 1e-9;
    return t * 1e6;
}

void SkyTrack::validate() const {
    if (samples.empty()) throw DataError("sky track is empty");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (std::fabs(samples[i].alt_deg) > 90.0) throw DataError("sky track altitude outside [-90, 90]");
        if (i > 0 && !(samples[i].utc > samples[i - 1].utc))
            throw DataError("sky track timestamps must be strictly increasing");
    }
}

SkyTrack SkyTrack::from_radec(double ra, double dec, const SitePosition& site, UtcTime start,
                              double duration_min, double cadence_min) {
    SkyTrack t;
    for (UtcTime u : sample_times(start, duration_min, cadence_min)) {
        const HorizontalCoord h = radec_to_azalt(ra, dec, site, u);
        t.samples.push_back({u, h.az_deg, h.alt_deg});
    }
    return t;
}

SkyTrack SkyTrack::from_start_azalt(double az, double alt, const SitePosition& site, UtcTime start,
                                    double duration_min, double cadence_min) {
    double ha0 = 0, dec = 0;
    azalt_to_hadec(az, alt, site.latitude_deg, ha0, dec);
    SkyTrack t;
    for (UtcTime u : sample_times(start, duration_min, cadence_min)) {
        const double days = static_cast<double>((u - start).count()) / 86400.0;
        const HorizontalCoord h = hadec_to_azalt(ha0 + kSiderealDegPerDay * days, dec, site.latitude_deg);
        t.samples.push_back({u, h.az_deg, h.alt_deg});
    }
    return t;
}

SkyTrack SkyTrack::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sky track '" + path + "'");
    SkyTrack t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.find("utc") != std::string::npos) continue;
        std::stringstream ss(line);
        std::string utc, az, alt;
        if (!std::getline(ss, utc, ',') || !std::getline(ss, az, ',') || !std::getline(ss, alt, ','))
            throw DataError(path + ":" + std::to_string(lineno) + ": expected utc,az,alt");
        try {
            t.samples.push_back({parse_utc(utc), std::stod(az), std::stod(alt)});
        } catch (const std::invalid_argument&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    t.validate();
    return t;
}

ValidityWindow tau_valid(Side k, const SkyTrack& track, const Stations& st, const ChannelDelays& delays) {
    track.validate();
    delays.validate();
    ValidityWindow w;
    const SitePosition& site = st.receiver_site(k);
    for (std::size_t i = 0; i < track.samples.size(); ++i) {
        const auto& smp = track.samples[i];
        const double tg = tau_geom_us(k, st, direction_from_azalt(smp.az_deg, smp.alt_deg, site), delays);
        w.tau_geom_us.push_back(tg);
        if (i == 0 || tg < w.tau_geom_min_us) {
            w.tau_geom_min_us = tg;
            w.argmin = i;
        }
    }
    w.tau_valid_us = tau_valid_from_components(w.tau_geom_min_us, delays);
    w.in_alignment = w.tau_valid_us > 0.0;
    return w;
}

double tau_valid_from_components(double tau_geom_min_us, const ChannelDelays& delays) {
    return tau_geom_min_us - (delays.tau_set_ns + delays.tau_buffer_ns) * 1e-3;
}

}  // namespace cosmicbell::geom
