#pragma once

namespace cosmicbell::special {

double erfc(double x);
double erfc_inv(double y);

// log10 of erfc(x), finite far beyond the double underflow of erfc itself.
double log10_erfc(double x);

// Two-sided Gaussian tail: erfc(|z|/sqrt2).
double two_sided_p(double z);

// Upper tail of the chi-squared distribution.
double chi2_sf(double x, int dof);

// Number of one-sided Gaussian standard deviations: sqrt2 * erfc^-1(2p).
double sigmas_of_p(double p);

// Same, from log10 p; usable when p underflows a double.
double sigmas_of_log10_p(double log10_p);

}  // namespace cosmicbell::special
