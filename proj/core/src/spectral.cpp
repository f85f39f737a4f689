#include "cosmicbell/spectral.hpp"

#include "cosmicbell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cosmicbell::spectral {

namespace {

std::vector<double> grid(double lo, double hi) {
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / kGridStepNm + 1e-9));
    g.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) g.push_back(lo + static_cast<double>(k) * kGridStepNm);
    return g;
}

void require_cover(const Curve& c, const char* what, double lo, double hi) {
    if (!c.covers(lo, hi)) {
        throw DataError(std::string(what) + " curve does not cover " + std::to_string(lo) + "-" + std::to_string(hi) + " nm");
    }
}

// Trapezoid over the common grid.
template <class F>
double integrate(double lo, double hi, F f) {
    const auto g = grid(lo, hi);
    double s = 0;
    for (std::size_t k = 1; k < g.size(); ++k) s += 0.5 * (f(g[k - 1]) + f(g[k])) * (g[k] - g[k - 1]);
    return s;
}

}  // namespace

double Curve::at(double x) const {
    if (nm.empty()) throw DataError("empty curve");
    if (x < nm.front() - 1e-9 || x > nm.back() + 1e-9) {
        throw DataError("wavelength " + std::to_string(x) + " nm outside curve range");
    }
    const auto it = std::upper_bound(nm.begin(), nm.end(), x);
    if (it == nm.begin()) return value.front();
    if (it == nm.end()) return value.back();
    const auto k = static_cast<std::size_t>(it - nm.begin());
    const double t = (x - nm[k - 1]) / (nm[k] - nm[k - 1]);
    return value[k - 1] + t * (value[k] - value[k - 1]);
}

bool Curve::covers(double lo_nm, double hi_nm) const {
    return !nm.empty() && nm.front() <= lo_nm + 1e-9 && nm.back() >= hi_nm - 1e-9;
}

void Curve::validate(bool transmission) const {
    if (nm.size() < 2 || nm.size() != value.size()) throw DataError("curve needs at least two (nm, value) samples");
    for (std::size_t k = 0; k < nm.size(); ++k) {
        if (k > 0 && !(nm[k] > nm[k - 1])) throw DataError("curve wavelengths must be strictly increasing");
        if (!(value[k] >= 0)) throw DataError("curve values must be >= 0");
        if (transmission && value[k] > 1) throw DataError("transmission samples must lie in [0,1]");
    }
}

Curve Curve::parse_csv(const std::string& text, const std::string& origin) {
    Curve c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x = 0, y = 0;
        if (!(ls >> x >> y)) {
            if (c.nm.empty()) continue;  // header
            throw DataError(origin + ":" + std::to_string(lineno) + ": expected nm,value");
        }
        c.nm.push_back(x);
        c.value.push_back(y);
    }
    c.validate(false);
    return c;
}

Curve Curve::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open curve '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path);
}

Curve Curve::constant(double v, double lo_nm, double hi_nm) { return {{lo_nm, hi_nm}, {v, v}}; }

Curve Curve::edge(double edge_nm, double width_nm, bool longpass, double lo_nm, double hi_nm, double peak) {
    Curve c;
    for (double x : grid(lo_nm, hi_nm)) {
        const double z = (x - edge_nm) / width_nm;
        const double up = z > 40 ? 1.0 : (z < -40 ? 0.0 : 1.0 / (1.0 + std::exp(-z)));
        c.nm.push_back(x);
        c.value.push_back(peak * (longpass ? up : 1.0 - up));
    }
    return c;
}

Curve Curve::tabulate(double lo_nm, double hi_nm, double step_nm, double (*f)(double)) {
    Curve c;
    const auto n = static_cast<std::size_t>(std::floor((hi_nm - lo_nm) / step_nm + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        const double x = lo_nm + static_cast<double>(k) * step_nm;
        c.nm.push_back(x);
        c.value.push_back(f(x));
    }
    return c;
}

void FilterChain::validate() const {
    for (const Curve* c : {&beamsplitter, &sp1, &lp1, &sp2, &mirrors, &lens, &qe}) c->validate(true);
}

Curve apply_extinction(const Curve& spectrum, double airmass, const Curve& ext) {
    if (!(airmass >= 0)) throw DomainError("airmass must be >= 0");
    spectrum.validate(false);
    Curve out = spectrum;
    if (airmass == 0) return out;
    require_cover(ext, "extinction", spectrum.lo(), spectrum.hi());
    for (std::size_t k = 0; k < out.nm.size(); ++k) out.value[k] *= std::pow(10.0, -0.4 * ext.at(out.nm[k]) * airmass);
    return out;
}

BandRates band_rates(const Curve& spectrum, const FilterChain& chain) {
    spectrum.validate(false);
    chain.validate();
    const double lo = spectrum.lo(), hi = spectrum.hi();
    for (const auto& [c, name] : {std::pair{&chain.beamsplitter, "beamsplitter"}, {&chain.sp1, "SP1"}, {&chain.lp1, "LP1"},
                                  {&chain.sp2, "SP2"}, {&chain.mirrors, "mirror"}, {&chain.lens, "lens"}, {&chain.qe, "QE"}})
        require_cover(*c, name, lo, hi);

    auto common = [&](double x) { return spectrum.at(x) * chain.mirrors.at(x) * chain.lens.at(x) * chain.qe.at(x); };
    auto red_path = [&](double x) { return common(x) * chain.beamsplitter.at(x) * chain.lp1.at(x) * chain.sp2.at(x); };
    auto blue_path = [&](double x) { return common(x) * (1.0 - chain.beamsplitter.at(x)) * chain.sp1.at(x); };
    const double split = std::clamp(chain.split_nm, lo, hi);

    BandRates r;
    const double red_from_red = integrate(split, hi, red_path);
    const double red_from_blue = integrate(lo, split, red_path);
    const double blue_from_blue = integrate(lo, split, blue_path);
    const double blue_from_red = integrate(split, hi, blue_path);
    r.red_cps = red_from_red + red_from_blue;
    r.blue_cps = blue_from_blue + blue_from_red;
    r.f_blue_to_red = r.red_cps > 0 ? red_from_blue / r.red_cps : 0.0;
    r.f_red_to_blue = r.blue_cps > 0 ? blue_from_red / r.blue_cps : 0.0;
    return r;
}

double snr(double s, double n) {
    if (s <= 0) return 0.0;
    return s / std::sqrt(s + std::max(0.0, n));
}

std::vector<RankedChain> rank_filter_sets(const std::vector<FilterChain>& candidates, const std::vector<Curve>& spectra,
                                          const Curve& skyglow) {
    if (candidates.empty()) throw DomainError("no filter sets to rank");
    std::vector<RankedChain> out;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const BandRates sky = band_rates(skyglow, candidates[k]);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& s : spectra) {
            const BandRates b = band_rates(s, candidates[k]);
            worst = std::min({worst, snr(b.red_cps, sky.red_cps), snr(b.blue_cps, sky.blue_cps)});
        }
        out.push_back({k, candidates[k].name, spectra.empty() ? 0.0 : worst});
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedChain& a, const RankedChain& b) { return a.min_snr > b.min_snr; });
    return out;
}

double airmass_of_altitude(double alt_deg) {
    if (!(alt_deg > 0 && alt_deg <= 90)) throw DomainError("altitude must be in (0, 90] for an airmass");
    // Kasten-Young
    return 1.0 / (std::sin(alt_deg * std::numbers::pi / 180.0) + 0.50572 * std::pow(alt_deg + 6.07995, -1.6364));
}

Curve illustrative_extinction() {
    return Curve::tabulate(350.0, 1000.0, 5.0, [](double x) { return 0.06 * std::pow(x / 550.0, -4.0) + 0.01; });
}

Curve illustrative_skyglow() {
    return Curve::tabulate(350.0, 1000.0, 5.0, [](double x) { return 1.0 + (x > 700.0 ? 0.08 * (x - 700.0) : 0.0); });
}

FilterChain illustrative_chain(double sp2_nm) {
    const double lo = 350.0, hi = 1000.0;
    FilterChain c;
    c.name = "BS630/SP620/LP637/SP" + std::to_string(static_cast<int>(std::lround(sp2_nm)));
    c.beamsplitter = Curve::edge(630.0, 1.0, true, lo, hi, 0.98);
    c.sp1 = Curve::edge(620.0, 0.8, false, lo, hi, 0.95);
    c.lp1 = Curve::edge(637.0, 0.8, true, lo, hi, 0.95);
    c.sp2 = Curve::edge(sp2_nm, 1.5, false, lo, hi, 0.95);
    c.mirrors = Curve::tabulate(lo, hi, 10.0, [](double x) { return std::pow(0.92 - 0.06 * std::exp(-std::pow((x - 820.0) / 60.0, 2)), 3.0); });
    c.lens = Curve::constant(0.97, lo, hi);
    c.qe = Curve::tabulate(lo, hi, 10.0, [](double x) { return std::clamp(0.75 * std::exp(-std::pow((x - 700.0) / 260.0, 2)), 0.0, 1.0); });
    return c;
}

}  // namespace cosmicbell::spectral
