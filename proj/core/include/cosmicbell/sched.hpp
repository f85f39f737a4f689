#pragma once

#include "cosmicbell/cosmo.hpp"
#include "cosmicbell/geom.hpp"

#include <string>
#include <vector>

namespace cosmicbell::sched {

struct CatalogEntry {
    std::string id;
    double ra_deg = 0;
    double dec_deg = 0;
    double z = 0;
    double rmag = 0;

    void validate() const;
};

// Columns id,ra,dec,z,rmag with a header line.
std::vector<CatalogEntry> read_catalog_csv(const std::string& path);
void write_catalog_csv(const std::string& path, const std::vector<CatalogEntry>& entries);

// Drop entries fainter than mag_limit, then keep the per-patch Pareto front of
// (higher z, brighter magnitude). Output keeps input order.
std::vector<CatalogEntry> filter_catalog(const std::vector<CatalogEntry>& entries, double mag_limit = 19.0,
                                         double patch_deg = 5.0);

struct Observability {
    std::vector<double> alt_deg;  // one per minute from the window start
    int minutes_visible = 0;
};

Observability observability(const CatalogEntry& e, const geom::SitePosition& site, geom::UtcTime start,
                            double duration_min, double min_alt_deg = 25.0);

// Count-rate model used only for feasibility and the heuristic significance.
struct RateModel {
    double signal_cps_at_ref = 6000;  // both ports together
    double ref_mag = 17.0;
    double noise_cps = 700;           // both ports together
    double visibility = 0.935;
    double coincidence_cps = 17.3;    // jointly valid trials per second at reference duty
    double ref_joint_duty = 1.75e-4;

    double signal_cps(double rmag) const;
    double epsilon(double rmag) const;  // per side, noise share of detections
};

struct ScheduleSetup {
    geom::Stations stations;
    geom::ChannelDelays delays_a;
    geom::ChannelDelays delays_b;
    geom::UtcTime start{};
    double duration_min = 90;
    double min_alt_deg = 25;
    RateModel rates;
};

struct PairScore {
    std::string id_a;
    std::string id_b;
    double alpha_deg = 0;
    double f_excl = 0;
    double min_snr = 0;
    int minutes = 0;
    std::vector<int> valid_minutes;  // offsets from the window start
    double min_tau_valid_a_us = 0;
    double min_tau_valid_b_us = 0;
    double nu_per_minute = 0;  // heuristic
    double expected_nu = 0;    // heuristic
};

// Strict weak order used by score_pairs.
bool ranks_before(const PairScore& x, const PairScore& y);

// Every pair in both station assignments; infeasible pairs are omitted.
// Order: F_excl, then expected nu, then minutes (all descending), then ids.
std::vector<PairScore> score_pairs(const std::vector<CatalogEntry>& entries, const ScheduleSetup& setup,
                                   const cosmo::Cosmology& cosmology);

void write_scores_csv(const std::string& path, const std::vector<PairScore>& scores);

}  // namespace cosmicbell::sched
