#include "cosmicbell/signif.hpp"

#include "cosmicbell/errors.hpp"
#include "cosmicbell/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cosmicbell::signif {

namespace {

struct Prepared {
    double N = 0;
    std::array<double, 4> q{};
    std::array<double, 4> win{};
    std::array<double, 4> eps{};
};

Prepared prepare(const SignificanceInput& in) {
    in.eps.validate();
    Prepared p;
    p.N = static_cast<double>(in.counts.total());
    if (p.N < 2) throw DataError("significance needs at least two coincidences");
    p.q = setting_frequencies(in.counts);
    for (std::size_t c = 0; c < 4; ++c) {
        if (p.q[c] == 0) {
            throw DataError(std::string("significance: no trials with setting ") + chsh::CoincidenceCounts::cell_label(c));
        }
    }
    const auto w = in.counts.wins();
    for (std::size_t c = 0; c < 4; ++c) p.win[c] = static_cast<double>(w[c]);
    p.eps = in.eps.eps_ij;
    return p;
}

double eps_bar_of(const std::array<double, 4>& eps) {
    double s = 0;
    for (double e : eps) s += e / (1 - e);
    return s;
}

}  // namespace

EpsilonInputs EpsilonInputs::from_table(const predict::PredictabilityTable& t) {
    EpsilonInputs e;
    for (std::size_t c = 0; c < 4; ++c) e.eps_ij[c] = t.eps_ij[c].value;
    for (std::size_t k = 0; k < 2; ++k) {
        e.eps_a[k] = t.eps_a[k].value;
        e.eps_b[k] = t.eps_b[k].value;
        e.sigma_a[k] = t.eps_a[k].sigma;
        e.sigma_b[k] = t.eps_b[k].sigma;
    }
    return e;
}

void EpsilonInputs::validate() const {
    for (std::size_t c = 0; c < 4; ++c) {
        if (!(eps_ij[c] >= 0)) throw DataError("eps_ij must be >= 0");
        if (!(eps_ij[c] < 1)) {
            throw DataError(std::string("eps_") + chsh::CoincidenceCounts::cell_label(c) +
                            " = 1 leaves no unpredictable trials (division by zero in W)");
        }
    }
    for (std::size_t k = 0; k < 2; ++k)
        if (sigma_a[k] < 0 || sigma_b[k] < 0) throw DataError("predictability uncertainties must be >= 0");
}

std::array<double, 4> setting_frequencies(const chsh::CoincidenceCounts& c) {
    const double n = static_cast<double>(c.total());
    if (n == 0) throw DataError("no coincidences");
    std::array<double, 4> q{};
    for (std::size_t k = 0; k < 4; ++k) q[k] = static_cast<double>(c.cell_total(k)) / n;
    return q;
}

double win_statistic(const SignificanceInput& in) {
    const Prepared p = prepare(in);
    double w = 0;
    for (std::size_t c = 0; c < 4; ++c) w += p.win[c] / (p.q[c] * (1 - p.eps[c]));
    return w;
}

ExpectedW expected_W(const SignificanceInput& in) {
    const Prepared p = prepare(in);
    ExpectedW e;
    e.eps_bar = eps_bar_of(p.eps);
    e.expected_W = p.N * (3 + e.eps_bar);
    return e;
}

OptimalFractions optimal_fractions(const SignificanceInput& in) {
    const Prepared p = prepare(in);
    const double eb = eps_bar_of(p.eps);
    OptimalFractions out;
    for (std::size_t c = 0; c < 4; ++c) {
        out.f[c] = 0.5 - p.q[c] + (p.N - 1) / (2 * p.N) * (p.eps[c] / (1 - p.eps[c]) - eb * p.q[c]);
    }
    if (std::all_of(out.f.begin(), out.f.end(), [](double v) { return v >= 0; })) return out;

    // Stationarity with the non-negativity constraints active: f_c = max(0, f*_c - mu), sum f = 1.
    out.clamped = true;
    std::array<double, 4> sorted = out.f;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cum = 0, mu = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        cum += sorted[k];
        const double t = (cum - 1) / static_cast<double>(k + 1);
        if (sorted[k] - t > 0) mu = t;
    }
    for (double& v : out.f) v = std::max(0.0, v - mu);
    return out;
}

double sigma_W_opt(const SignificanceInput& in) {
    const Prepared p = prepare(in);
    const double N = p.N;
    const double eb = eps_bar_of(p.eps);
    double inv_q = 0, t3 = 0, t5 = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        const double q = p.q[c], e = p.eps[c];
        inv_q += 1 / q;
        t3 += e / (q * (1 - e));
        t5 += (N - e) * e / (q * (1 - e) * (1 - e));
    }
    const double s2 = N * N / (4 * (N - 1)) * (inv_q - 4) - N * eb + N / 4 * t3 - (N - 1) * eb * eb / 4 + t5 / 4;
    if (!(s2 > 0)) throw InternalError("sigma_W^opt: non-positive variance " + std::to_string(s2));
    return std::sqrt(s2);
}

NuChain nu_chain(const SignificanceInput& in, double W, double expected_w, double sigma) {
    if (!(sigma > 0)) throw DomainError("nu chain needs sigma > 0");
    const Prepared p = prepare(in);
    const OptimalFractions f = optimal_fractions(in);
    NuChain r;
    r.nu_bar = (W - expected_w) / sigma;
    std::array<double, 4> term{};
    for (std::size_t c = 0; c < 4; ++c) {
        r.E_cal[c] = p.win[c] - p.N * p.q[c] - (r.nu_bar * p.N / (2 * sigma)) * f.f[c];
        term[c] = r.E_cal[c] / (p.q[c] * (1 - p.eps[c]) * (1 - p.eps[c]));
    }
    const auto& sa = in.eps.sigma_a;
    const auto& sb = in.eps.sigma_b;
    const double d2 = std::pow(sa[0] / sigma * (term[0] + term[1]), 2) + std::pow(sa[1] / sigma * (term[2] + term[3]), 2) +
                      std::pow(sb[0] / sigma * (term[0] + term[2]), 2) + std::pow(sb[1] / sigma * (term[1] + term[3]), 2);
    r.delta_nu = std::sqrt(d2);
    r.nu_n = r.nu_bar / (1 + r.delta_nu);

    const double x = r.nu_n / std::numbers::sqrt2;
    r.log10_p_cond = special::log10_erfc(x) - std::log10(2.0);
    r.p_cond = special::erfc(x) / 2;
    r.log10_p_no_mem = std::min(0.0, r.log10_p_cond + std::log10(2.0));
    r.p_no_mem = std::min(1.0, 2 * r.p_cond);
    r.nu_no_mem = special::sigmas_of_log10_p(r.log10_p_no_mem);
    return r;
}

FinalP final_p(double log10_p_no_mem, double B) {
    if (!(B >= 0)) throw DomainError("memory bound must be >= 0");
    if (!(B < 1)) throw DomainError("memory bound B >= 1 leaves the p-value unbounded");
    FinalP f;
    f.log10_p = std::min(0.0, log10_p_no_mem - std::log10(1 - B));
    f.p = std::pow(10.0, f.log10_p);
    f.nu = special::sigmas_of_log10_p(f.log10_p);
    return f;
}

SignificanceReport analyze(const SignificanceInput& in, const MemoryBoundOptions& mem) {
    const Prepared p = prepare(in);
    SignificanceReport r;
    r.q = p.q;
    r.wins = p.win;
    r.N = p.N;
    r.W = win_statistic(in);
    r.expected = expected_W(in);
    r.f_opt = optimal_fractions(in);
    r.sigma_W_opt = sigma_W_opt(in);
    r.nu = nu_chain(in, r.W, r.expected.expected_W, r.sigma_W_opt);
    r.memory = memory_bound(StepDistribution::from(p.q, p.eps), mem);
    r.final = final_p(r.nu.log10_p_no_mem, r.memory.B);
    r.violation = r.W > r.expected.expected_W;
    return r;
}

}  // namespace cosmicbell::signif
