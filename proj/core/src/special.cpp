#include "cosmicbell/special.hpp"

#include "cosmicbell/errors.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cosmicbell::special {

double erfc(double x) { return std::erfc(x); }

double erfc_inv(double y) {
    if (!(y > 0.0 && y < 2.0)) throw DomainError("erfc_inv: argument must lie in (0, 2)");
    return boost::math::erfc_inv(y);
}

double log10_erfc(double x) {
    if (x < 20.0) return std::log10(std::erfc(x));
    // erfc(x) = exp(-x^2)/(x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6) + ...)
    const double inv2 = 1.0 / (2.0 * x * x);
    double term = 1.0, series = 1.0;
    for (int k = 1; k < 8; ++k) {
        term *= -(2.0 * k - 1.0) * inv2;
        series += term;
    }
    const double ln = -x * x - std::log(x * std::sqrt(std::numbers::pi)) + std::log(series);
    return ln / std::numbers::ln10;
}

double two_sided_p(double z) { return std::erfc(std::fabs(z) / std::numbers::sqrt2); }

double chi2_sf(double x, int dof) {
    if (dof < 1) throw DomainError("chi2_sf: dof must be >= 1");
    if (x <= 0.0) return 1.0;
    if (dof == 1) return std::erfc(std::sqrt(x / 2.0));
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double sigmas_of_p(double p) {
    if (!(p > 0.0)) throw DomainError("sigmas_of_p: p must be positive");
    // p = 1 maps to erfc^-1(2) = -inf; keep the report finite.
    const double y = std::min(2.0 * p, std::nextafter(2.0, 0.0));
    return std::numbers::sqrt2 * boost::math::erfc_inv(y);
}

double sigmas_of_log10_p(double log10_p) {
    if (log10_p > -300.0) return sigmas_of_p(std::pow(10.0, log10_p));
    // Solve log10(erfc(nu/sqrt2)/2) = log10_p by Newton on the asymptotic form.
    double nu = std::sqrt(-2.0 * log10_p * std::numbers::ln10);
    for (int it = 0; it < 60; ++it) {
        const double f = log10_erfc(nu / std::numbers::sqrt2) - std::log10(2.0) - log10_p;
        // d/dnu log10(erfc(nu/sqrt2)) ~ -(nu + 1/nu) / ln10
        const double df = -(nu + 1.0 / nu) / std::numbers::ln10;
        const double step = f / df;
        nu -= step;
        if (std::fabs(step) < 1e-12 * nu) break;
    }
    return nu;
}

}  // namespace cosmicbell::special
