#include "cosmicbell/sched.hpp"

#include "cosmicbell/errors.hpp"
#include "cosmicbell/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace cosmicbell::sched {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::pair<long, long> patch_of(const CatalogEntry& e, double patch) {
    const long band = static_cast<long>(std::floor((e.dec_deg + 90.0) / patch));
    const double centre = -90.0 + (static_cast<double>(band) + 0.5) * patch;
    const double width = patch / std::max(0.05, std::cos(centre * std::numbers::pi / 180.0));
    return {band, static_cast<long>(std::floor(e.ra_deg / width))};
}

struct SideTrack {
    std::vector<double> alt;
    std::vector<double> tau_valid_us;
};

SideTrack track(const CatalogEntry& e, geom::Side k, const ScheduleSetup& s) {
    const auto& site = s.stations.receiver_site(k);
    const auto& delays = k == geom::Side::A ? s.delays_a : s.delays_b;
    SideTrack t;
    const auto sky = geom::SkyTrack::from_radec(e.ra_deg, e.dec_deg, site, s.start, s.duration_min, 1.0);
    for (const auto& smp : sky.samples) {
        t.alt.push_back(smp.alt_deg);
        const double tg = geom::tau_geom_us(k, s.stations, geom::direction_from_azalt(smp.az_deg, smp.alt_deg, site), delays);
        t.tau_valid_us.push_back(geom::tau_valid_from_components(tg, delays));
    }
    return t;
}

}  // namespace

void CatalogEntry::validate() const {
    if (!(z >= 0)) throw DataError("catalog entry " + id + ": z must be >= 0");
    if (!(dec_deg >= -90 && dec_deg <= 90) || !(ra_deg >= 0 && ra_deg < 360))
        throw DataError("catalog entry " + id + ": coordinates out of range");
}

std::vector<CatalogEntry> read_catalog_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open catalog '" + path + "'");
    std::vector<CatalogEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line.rfind("id", 0) == 0) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(trim(cell));
        if (f.size() != 5) throw DataError(path + ":" + std::to_string(lineno) + ": expected id,ra,dec,z,rmag");
        CatalogEntry e;
        e.id = f[0];
        try {
            e.ra_deg = std::stod(f[1]);
            e.dec_deg = std::stod(f[2]);
            e.z = std::stod(f[3]);
            e.rmag = std::stod(f[4]);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad number");
        }
        e.validate();
        out.push_back(e);
    }
    return out;
}

void write_catalog_csv(const std::string& path, const std::vector<CatalogEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "id,ra,dec,z,rmag\n";
    out.precision(10);
    for (const auto& e : entries) out << e.id << ',' << e.ra_deg << ',' << e.dec_deg << ',' << e.z << ',' << e.rmag << '\n';
}

std::vector<CatalogEntry> filter_catalog(const std::vector<CatalogEntry>& entries, double mag_limit, double patch_deg) {
    if (!(patch_deg > 0)) throw DomainError("patch size must be > 0");
    std::map<std::pair<long, long>, std::vector<std::size_t>> patches;
    for (std::size_t k = 0; k < entries.size(); ++k)
        if (entries[k].rmag <= mag_limit) patches[patch_of(entries[k], patch_deg)].push_back(k);

    std::vector<bool> keep(entries.size(), false);
    for (auto& [key, idx] : patches) {
        // Sort by z descending, brighter first on ties; an entry survives if brighter than all before it.
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (entries[a].z != entries[b].z) return entries[a].z > entries[b].z;
            return entries[a].rmag < entries[b].rmag;
        });
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k : idx) {
            if (entries[k].rmag < best) {
                keep[k] = true;
                best = entries[k].rmag;
            }
        }
    }
    std::vector<CatalogEntry> out;
    for (std::size_t k = 0; k < entries.size(); ++k)
        if (keep[k]) out.push_back(entries[k]);
    return out;
}

Observability observability(const CatalogEntry& e, const geom::SitePosition& site, geom::UtcTime start,
                            double duration_min, double min_alt_deg) {
    if (!(duration_min >= 0)) throw DomainError("observability window must have non-negative length");
    Observability o;
    const auto sky = geom::SkyTrack::from_radec(e.ra_deg, e.dec_deg, site, start, duration_min, 1.0);
    for (const auto& s : sky.samples) {
        o.alt_deg.push_back(s.alt_deg);
        if (s.alt_deg > min_alt_deg) ++o.minutes_visible;
    }
    return o;
}

double RateModel::signal_cps(double rmag) const { return signal_cps_at_ref * std::pow(10.0, -0.4 * (rmag - ref_mag)); }

double RateModel::epsilon(double rmag) const {
    const double s = signal_cps(rmag);
    return s + noise_cps > 0 ? noise_cps / (s + noise_cps) : 1.0;
}

std::vector<PairScore> score_pairs(const std::vector<CatalogEntry>& entries, const ScheduleSetup& setup,
                                   const cosmo::Cosmology& cosmology) {
    if (entries.size() < 2) throw DomainError("scheduling needs at least two catalog entries");
    const double threshold = predict::visibility_constraint(setup.rates.visibility).threshold;
    std::vector<SideTrack> ta, tb;
    for (const auto& e : entries) {
        e.validate();
        ta.push_back(track(e, geom::Side::A, setup));
        tb.push_back(track(e, geom::Side::B, setup));
    }
    std::vector<PairScore> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = 0; j < entries.size(); ++j) {
            if (i == j) continue;
            const auto& ea = entries[i];
            const auto& eb = entries[j];
            const double alpha = cosmo::angular_separation(ea.ra_deg, ea.dec_deg, eb.ra_deg, eb.dec_deg);
            if (!(alpha > 1e-6)) continue;  // same line of sight: no independent settings
            const double eps = setup.rates.epsilon(ea.rmag) + setup.rates.epsilon(eb.rmag);
            if (!(eps < threshold)) continue;

            PairScore p;
            p.id_a = ea.id;
            p.id_b = eb.id;
            p.alpha_deg = alpha;
            p.min_tau_valid_a_us = std::numeric_limits<double>::infinity();
            p.min_tau_valid_b_us = std::numeric_limits<double>::infinity();
            double duty = 0;
            for (std::size_t m = 0; m < ta[i].alt.size(); ++m) {
                const bool up = ta[i].alt[m] > setup.min_alt_deg && tb[j].alt[m] > setup.min_alt_deg;
                const double va = ta[i].tau_valid_us[m], vb = tb[j].tau_valid_us[m];
                if (!up || !(va > 0) || !(vb > 0)) continue;
                p.valid_minutes.push_back(static_cast<int>(m));
                p.min_tau_valid_a_us = std::min(p.min_tau_valid_a_us, va);
                p.min_tau_valid_b_us = std::min(p.min_tau_valid_b_us, vb);
                const double ra = setup.rates.signal_cps(ea.rmag) + setup.rates.noise_cps;
                const double rb = setup.rates.signal_cps(eb.rmag) + setup.rates.noise_cps;
                duty += (1 - std::exp(-ra * va * 1e-6)) * (1 - std::exp(-rb * vb * 1e-6));
            }
            p.minutes = static_cast<int>(p.valid_minutes.size());
            if (p.minutes == 0) continue;
            duty /= p.minutes;
            p.f_excl = cosmology.excluded_fraction(ea.z, eb.z, alpha);
            const double s_min = std::min(setup.rates.signal_cps(ea.rmag), setup.rates.signal_cps(eb.rmag)) / 2;
            p.min_snr = s_min / std::sqrt(s_min + setup.rates.noise_cps / 2);
            // nu ~ sqrt(trials): trials/minute scale with the joint duty relative to the reference.
            const double trials_per_min = 60.0 * setup.rates.coincidence_cps * duty / setup.rates.ref_joint_duty;
            p.nu_per_minute = 0.07 * std::sqrt(trials_per_min);
            p.expected_nu = p.nu_per_minute * std::sqrt(static_cast<double>(p.minutes));
            out.push_back(std::move(p));
        }
    }
    std::stable_sort(out.begin(), out.end(), ranks_before);
    return out;
}

bool ranks_before(const PairScore& x, const PairScore& y) {
    if (x.f_excl != y.f_excl) return x.f_excl > y.f_excl;
    if (x.expected_nu != y.expected_nu) return x.expected_nu > y.expected_nu;
    if (x.minutes != y.minutes) return x.minutes > y.minutes;
    return std::tie(x.id_a, x.id_b) < std::tie(y.id_a, y.id_b);
}

void write_scores_csv(const std::string& path, const std::vector<PairScore>& scores) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "rank,id_a,id_b,alpha_deg,f_excl,min_snr,minutes,min_tau_valid_a_us,min_tau_valid_b_us,nu_per_minute,expected_nu\n";
    out.precision(8);
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const auto& s = scores[k];
        out << k + 1 << ',' << s.id_a << ',' << s.id_b << ',' << s.alpha_deg << ',' << s.f_excl << ',' << s.min_snr << ','
            << s.minutes << ',' << s.min_tau_valid_a_us << ',' << s.min_tau_valid_b_us << ',' << s.nu_per_minute << ','
            << s.expected_nu << '\n';
    }
}

}  // namespace cosmicbell::sched
