#pragma once

#include <string>
#include <vector>

namespace cosmicbell::spectral {

// Piecewise-linear sampled function of wavelength (nm).
struct Curve {
    std::vector<double> nm;
    std::vector<double> value;

    double at(double wavelength_nm) const;  // throws outside [front, back]
    double lo() const { return nm.front(); }
    double hi() const { return nm.back(); }
    bool covers(double lo_nm, double hi_nm) const;
    void validate(bool transmission) const;

    static Curve from_csv(const std::string& path);
    static Curve parse_csv(const std::string& text, const std::string& origin = "curve");
    static Curve constant(double v, double lo_nm, double hi_nm);
    // Smooth edge: ~0 below and ~1 above edge_nm (longpass), or the reverse (shortpass).
    static Curve edge(double edge_nm, double width_nm, bool longpass, double lo_nm, double hi_nm, double peak = 1.0);
    static Curve tabulate(double lo_nm, double hi_nm, double step_nm, double (*f)(double));
};

using SpectrumTable = Curve;  // counts s^-1 nm^-1

inline constexpr double kGridStepNm = 0.5;

struct FilterChain {
    std::string name;
    Curve beamsplitter;  // transmission into the red port; reflection 1 - T feeds the blue port
    Curve sp1;           // blue arm shortpass
    Curve lp1;           // red arm longpass
    Curve sp2;           // red arm long-wavelength cutoff
    Curve mirrors;
    Curve lens;
    Curve qe;
    double split_nm = 630.0;  // photons above this are "red"

    void validate() const;
};

Curve apply_extinction(const Curve& spectrum, double airmass, const Curve& extinction_mag_per_airmass);

struct BandRates {
    double red_cps = 0;
    double blue_cps = 0;
    double f_blue_to_red = 0;  // share of the red port rate carried by blue-band photons
    double f_red_to_blue = 0;  // share of the blue port rate carried by red-band photons
};

BandRates band_rates(const Curve& spectrum, const FilterChain& chain);

double snr(double signal, double noise);

struct RankedChain {
    std::size_t index = 0;  // into the candidate list
    std::string name;
    double min_snr = 0;
};

// Stable descending order by the smallest port SNR over all spectra.
std::vector<RankedChain> rank_filter_sets(const std::vector<FilterChain>& candidates,
                                          const std::vector<Curve>& spectra, const Curve& skyglow);

double airmass_of_altitude(double alt_deg);

// Bundled illustrative curves (not metrologically traceable).
Curve illustrative_extinction();  // mag/airmass, Rayleigh-like plus a grey term
Curve illustrative_skyglow();     // flat continuum plus a ramp beyond 700 nm
FilterChain illustrative_chain(double sp2_nm = 745.0);

}  // namespace cosmicbell::spectral
