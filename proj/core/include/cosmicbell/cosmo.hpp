#pragma once

#include "cosmicbell/scale_factor_table.hpp"

#include <limits>
#include <memory>
#include <string>

namespace cosmicbell::cosmo {

inline constexpr double kSpeedOfLightKmS = 299792.458;
inline constexpr double kMpcKm = 3.0856775814913673e19;
inline constexpr double kGyrSeconds = 3.15576e16;  // Julian gigayear
inline constexpr double kInfiniteRedshift = std::numeric_limits<double>::infinity();

struct CosmologyParams {
    double H0 = 67.74;  // km s^-1 Mpc^-1
    double omega_lambda = 0.6911;
    double omega_m = 0.3089;
    double omega_r = 9.16e-5;
    double z_eq = 3371.0;  // informational only

    double omega_k() const { return 1.0 - (omega_lambda + omega_m + omega_r); }
    double hubble_time_gyr() const { return kMpcKm / H0 / kGyrSeconds; }
    // c/H0 in Gly, i.e. R0 expressed as a light-travel distance.
    double hubble_radius_gly() const { return hubble_time_gyr(); }

    void validate() const;
    static CosmologyParams from_json(const std::string& json_text);
    std::string to_json() const;
};

double hubble_E(double a, const CosmologyParams& p);

// Conformal time in units of 1/H0; z may be kInfiniteRedshift (returns 0).
double conformal_time_of_z(double z, const CosmologyParams& p);
double conformal_time_of_a(double a, const CosmologyParams& p);
double present_conformal_time(const CosmologyParams& p);

double lookback_time_of_z(double z, const CosmologyParams& p);  // Gyr
double lookback_time_of_a(double a, const CosmologyParams& p);  // Gyr

// Computed from its own integral over [a_e, 1], not as a difference.
double comoving_distance_of_z(double z, const CosmologyParams& p);

double angular_separation(double ra1_deg, double dec1_deg, double ra2_deg, double dec2_deg);

// Light-travel lookback (years) to an effective redshift, first order in H0*dt.
double effective_redshift(double lookback_years, const CosmologyParams& p);

double redshift_of_observed_wavelength(double lambda_obs_nm, double lambda_emit_nm);

struct LightconePair {
    double eta_a = 0.0;
    double eta_b = 0.0;
    double alpha_deg = 0.0;
    double chi_a = 0.0;
    double chi_b = 0.0;

    static LightconePair from_redshifts(double z_a, double z_b, double alpha_deg,
                                        const CosmologyParams& p);
};

double chi_separation(const LightconePair& pair);

struct CommonCause {
    double eta_ab = 0.0;
    bool exists = false;  // false: no common past since the big bang
    double lookback_gyr = std::numeric_limits<double>::quiet_NaN();
};

struct VolumeReport {
    double v0 = 0.0;  // R0^4-normalized past light cone of the experiment
    double v_a = 0.0;
    double v_b = 0.0;
    double v_i = 0.0;
    double frac_a = 0.0;  // v_a / v0
    double frac_b = 0.0;
    double frac_i = 0.0;
    double f_excl = 0.0;
};

// Bundles parameters with a build-once scale-factor table. Copies share the table.
class Cosmology {
public:
    explicit Cosmology(CosmologyParams params = {});

    const CosmologyParams& params() const { return params_; }
    const ScaleFactorTable& table() const { return *table_; }
    double eta0() const { return table_->eta0(); }

    CommonCause latest_common_cause(const LightconePair& pair) const;

    double lightcone_4volume(double eta_e) const;
    double intersection_4volume(const LightconePair& pair) const;

    // 1 - V_Q/V0 evaluated through deficit integrals, which stay accurate when the
    // emission events are only light-years away.
    double excluded_fraction(const LightconePair& pair) const;
    double excluded_fraction(double z_a, double z_b, double alpha_deg) const;

    VolumeReport volumes(const LightconePair& pair) const;

private:
    double deficit_cone(double chi) const;
    double deficit_intersection(const LightconePair& pair) const;
    double v0_reduced() const;

    CosmologyParams params_;
    std::shared_ptr<const ScaleFactorTable> table_;
    double v0_reduced_ = 0.0;
};

}  // namespace cosmicbell::cosmo
