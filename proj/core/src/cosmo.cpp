#include "cosmicbell/cosmo.hpp"

#include "cosmicbell/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cosmicbell::cosmo {

namespace {

constexpr double kQuadRtol = 1e-11;
constexpr double kInfinityScale = 1e-8;  // z = inf integrates down to this a
constexpr double kPi = std::numbers::pi;

template <class F>
double integrate(F f, double lo, double hi, double rtol = kQuadRtol) {
    if (hi <= lo) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 20, rtol, &err);
}

double scale_of_z(double z) {
    if (std::isnan(z) || z < 0.0) throw DomainError("redshift must be >= 0");
    if (std::isinf(z)) return 0.0;
    return 1.0 / (1.0 + z);
}

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

void CosmologyParams::validate() const {
    if (!(H0 > 0.0)) throw DomainError("H0 must be positive");
    if (omega_lambda < 0.0 || omega_m < 0.0 || omega_r < 0.0)
        throw DomainError("density fractions must be non-negative");
    if (omega_r == 0.0 && omega_m == 0.0) throw DomainError("need matter or radiation for a big bang");
}

CosmologyParams CosmologyParams::from_json(const std::string& json_text) {
    CosmologyParams p;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("cosmology json: ") + e.what());
    }
    if (j.contains("cosmology")) j = j["cosmology"];
    p.H0 = j.value("H0", p.H0);
    p.omega_lambda = j.value("omega_lambda", p.omega_lambda);
    p.omega_m = j.value("omega_m", p.omega_m);
    p.omega_r = j.value("omega_r", p.omega_r);
    p.z_eq = j.value("z_eq", p.z_eq);
    p.validate();
    return p;
}

std::string CosmologyParams::to_json() const {
    nlohmann::json j{{"H0", H0},         {"omega_lambda", omega_lambda}, {"omega_m", omega_m},
                     {"omega_r", omega_r}, {"omega_k", omega_k()},         {"z_eq", z_eq}};
    return j.dump();
}

double hubble_E(double a, const CosmologyParams& p) {
    if (!(a > 0.0)) throw DomainError("hubble_E: scale factor must be positive");
    if (a == 1.0) return std::sqrt(p.omega_lambda + p.omega_k() + p.omega_m + p.omega_r);
    const double ia = 1.0 / a;
    const double ia2 = ia * ia;
    return std::sqrt(p.omega_lambda + p.omega_k() * ia2 + p.omega_m * ia2 * ia + p.omega_r * ia2 * ia2);
}

double conformal_time_of_a(double a, const CosmologyParams& p) {
    if (!(a >= 0.0)) throw DomainError("conformal_time_of_a: a must be non-negative");
    // integrand 1/(a^2 E) -> 1/sqrt(Or) as a -> 0; written to avoid 0*inf
    auto f = [&p](double x) {
        if (x == 0.0) return p.omega_r > 0 ? 1.0 / std::sqrt(p.omega_r) : 0.0;
        return 1.0 / (x * x * hubble_E(x, p));
    };
    return integrate(f, 0.0, a);
}

double conformal_time_of_z(double z, const CosmologyParams& p) {
    return conformal_time_of_a(scale_of_z(z), p);
}

double present_conformal_time(const CosmologyParams& p) { return conformal_time_of_a(1.0, p); }

double lookback_time_of_a(double a, const CosmologyParams& p) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("lookback_time_of_a: a must be in [0,1]");
    auto f = [&p](double x) { return 1.0 / (x * hubble_E(x, p)); };
    double lo = a;
    double tail = 0.0;
    if (a < kInfinityScale) {
        lo = kInfinityScale;
        // radiation era: dt/t_H = a da / sqrt(Or)
        tail = (lo * lo - a * a) / (2.0 * std::sqrt(p.omega_r));
    }
    return (integrate(f, lo, 1.0) + tail) * p.hubble_time_gyr();
}

double lookback_time_of_z(double z, const CosmologyParams& p) {
    return lookback_time_of_a(scale_of_z(z), p);
}

double comoving_distance_of_z(double z, const CosmologyParams& p) {
    const double a = scale_of_z(z);
    auto f = [&p](double x) {
        if (x == 0.0) return p.omega_r > 0 ? 1.0 / std::sqrt(p.omega_r) : 0.0;
        return 1.0 / (x * x * hubble_E(x, p));
    };
    return integrate(f, a, 1.0);
}

double angular_separation(double ra1, double dec1, double ra2, double dec2) {
    // haversine form, well conditioned for small separations
    const double d1 = deg2rad(dec1), d2 = deg2rad(dec2);
    const double dra = deg2rad(ra2 - ra1);
    const double sdd = std::sin((d2 - d1) / 2), sdr = std::sin(dra / 2);
    const double h = sdd * sdd + std::cos(d1) * std::cos(d2) * sdr * sdr;
    return 2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0))) * 180.0 / kPi;
}

double effective_redshift(double lookback_years, const CosmologyParams& p) {
    if (lookback_years < 0.0) throw DomainError("effective_redshift: lookback must be >= 0");
    const double x = lookback_years / (p.hubble_time_gyr() * 1e9);
    if (x >= 1.0) throw DomainError("effective_redshift: lookback must be shorter than t_H");
    return x / (1.0 - x);
}

double redshift_of_observed_wavelength(double lambda_obs_nm, double lambda_emit_nm) {
    if (!(lambda_obs_nm > 0.0 && lambda_emit_nm > 0.0))
        throw DomainError("wavelengths must be positive");
    return lambda_obs_nm / lambda_emit_nm - 1.0;
}

LightconePair LightconePair::from_redshifts(double z_a, double z_b, double alpha_deg,
                                            const CosmologyParams& p) {
    if (!(alpha_deg >= 0.0 && alpha_deg <= 180.0)) throw DomainError("alpha must be in [0,180]");
    LightconePair pair;
    pair.eta_a = conformal_time_of_z(z_a, p);
    pair.eta_b = conformal_time_of_z(z_b, p);
    pair.chi_a = comoving_distance_of_z(z_a, p);
    pair.chi_b = comoving_distance_of_z(z_b, p);
    pair.alpha_deg = alpha_deg;
    return pair;
}

double chi_separation(const LightconePair& pair) {
    const double c = std::cos(deg2rad(pair.alpha_deg));
    const double s = pair.chi_a * pair.chi_a + pair.chi_b * pair.chi_b - 2.0 * pair.chi_a * pair.chi_b * c;
    return std::sqrt(std::max(0.0, s));
}

Cosmology::Cosmology(CosmologyParams params)
    : params_(params),
      table_(std::make_shared<const ScaleFactorTable>(ScaleFactorTable::build(params_))) {
    v0_reduced_ = v0_reduced();
}

CommonCause Cosmology::latest_common_cause(const LightconePair& pair) const {
    CommonCause cc;
    cc.eta_ab = 0.5 * (pair.eta_a + pair.eta_b - chi_separation(pair));
    cc.exists = cc.eta_ab > 0.0;
    if (cc.exists) cc.lookback_gyr = lookback_time_of_a(std::min(1.0, table_->a_of_eta(cc.eta_ab)), params_);
    return cc;
}

// All "reduced" integrals below omit the common 4pi/3 factor.

double Cosmology::v0_reduced() const {
    const double e0 = eta0();
    auto f = [&](double e) {
        const double a = table_->a_of_eta(e);
        const double x = e0 - e;
        return a * a * a * a * x * x * x;
    };
    return integrate(f, 0.0, e0);
}

double Cosmology::lightcone_4volume(double eta_e) const {
    if (!(eta_e >= 0.0 && eta_e <= eta0() * (1 + 1e-12)))
        throw DomainError("lightcone_4volume: eta_e must be in [0, eta0]");
    eta_e = std::min(eta_e, eta0());
    auto f = [&](double e) {
        const double a = table_->a_of_eta(e);
        const double x = eta_e - e;
        return a * a * a * a * x * x * x;
    };
    return 4.0 * kPi / 3.0 * integrate(f, 0.0, eta_e);
}

double Cosmology::intersection_4volume(const LightconePair& pair) const {
    const double chi_l = chi_separation(pair);
    const double d_eta = std::fabs(pair.eta_a - pair.eta_b);
    // one cone nested inside the other (includes coincident worldlines)
    if (chi_l <= d_eta) return lightcone_4volume(std::min(pair.eta_a, pair.eta_b));
    const double eta_ab = 0.5 * (pair.eta_a + pair.eta_b - chi_l);
    if (eta_ab <= 0.0) return 0.0;
    const double k = (chi_l * chi_l - d_eta * d_eta) / (4.0 * chi_l);
    auto f = [&](double e) {
        const double a = table_->a_of_eta(e);
        const double y = eta_ab - e;
        return a * a * a * a * (y * y * y / 3.0 + y * y * k);
    };
    return 4.0 * kPi * integrate(f, 0.0, eta_ab);
}

// V0 - V(eta0 - chi), with x = eta0 - eta: x^3 - (x - chi)^3 expanded so that no
// large terms cancel when chi is tiny.
double Cosmology::deficit_cone(double chi) const {
    if (chi <= 0.0) return 0.0;
    const double e0 = eta0();
    const double ek = std::max(0.0, e0 - chi);
    auto inner = [&](double e) {
        const double a = table_->a_of_eta(e);
        const double x = e0 - e;
        return a * a * a * a * (3 * x * x * chi - 3 * x * chi * chi + chi * chi * chi);
    };
    auto outer = [&](double e) {
        const double a = table_->a_of_eta(e);
        const double x = e0 - e;
        return a * a * a * a * x * x * x;
    };
    return integrate(inner, 0.0, ek) + integrate(outer, ek, e0);
}

// V0 - V_I, same expansion with d = eta0 - eta_AB.
double Cosmology::deficit_intersection(const LightconePair& pair) const {
    const double chi_l = chi_separation(pair);
    const double d_chi = std::fabs(pair.chi_a - pair.chi_b);
    if (chi_l <= d_chi) return deficit_cone(std::max(pair.chi_a, pair.chi_b));
    const double e0 = eta0();
    const double d = 0.5 * (pair.chi_a + pair.chi_b + chi_l);
    const double eta_ab = e0 - d;
    if (eta_ab <= 0.0) return v0_reduced_;
    const double k = (chi_l * chi_l - d_chi * d_chi) / (4.0 * chi_l);
    auto inner = [&](double e) {
        const double a = table_->a_of_eta(e);
        const double x = e0 - e;
        const double y = eta_ab - e;
        return a * a * a * a * (3 * x * x * d - 3 * x * d * d + d * d * d - 3 * k * y * y);
    };
    auto outer = [&](double e) {
        const double a = table_->a_of_eta(e);
        const double x = e0 - e;
        return a * a * a * a * x * x * x;
    };
    return integrate(inner, 0.0, eta_ab) + integrate(outer, eta_ab, e0);
}

double Cosmology::excluded_fraction(const LightconePair& pair) const {
    const double f = (deficit_cone(pair.chi_a) + deficit_cone(pair.chi_b) - deficit_intersection(pair)) /
                     v0_reduced_;
    return std::clamp(f, 0.0, 1.0);
}

double Cosmology::excluded_fraction(double z_a, double z_b, double alpha_deg) const {
    return excluded_fraction(LightconePair::from_redshifts(z_a, z_b, alpha_deg, params_));
}

VolumeReport Cosmology::volumes(const LightconePair& pair) const {
    VolumeReport r;
    r.v0 = 4.0 * kPi / 3.0 * v0_reduced_;
    r.v_a = lightcone_4volume(pair.eta_a);
    r.v_b = lightcone_4volume(pair.eta_b);
    r.v_i = intersection_4volume(pair);
    r.frac_a = r.v_a / r.v0;
    r.frac_b = r.v_b / r.v0;
    r.frac_i = r.v_i / r.v0;
    r.f_excl = excluded_fraction(pair);
    return r;
}

}  // namespace cosmicbell::cosmo
