#include "cosmicbell/memory_bound.hpp"

#include "cosmicbell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cosmicbell::signif {

namespace {

constexpr double kNegTol = 1e-12;

std::size_t binom(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Count vectors (c0..c4) with total d, for every d up to n_max, plus successor indices.
struct Lattice {
    std::vector<std::vector<std::array<std::uint8_t, 5>>> states;
    std::vector<std::vector<std::array<std::uint32_t, 5>>> next;
    std::vector<std::vector<std::uint8_t>> negative;

    Lattice(int n_max, const std::array<double, 5>& step) {
        const auto n = static_cast<std::size_t>(n_max);
        const std::size_t side = n + 1;
        auto key = [side](const std::array<std::uint8_t, 5>& s) {
            return ((static_cast<std::size_t>(s[0]) * side + s[1]) * side + s[2]) * side + s[3];
        };
        states.resize(n + 1);
        negative.resize(n + 1);
        next.resize(n + 1);
        for (std::size_t d = 0; d <= n; ++d) {
            for (std::size_t a = 0; a <= d; ++a)
                for (std::size_t b = 0; a + b <= d; ++b)
                    for (std::size_t c = 0; a + b + c <= d; ++c)
                        for (std::size_t e = 0; a + b + c + e <= d; ++e) {
                            const std::array<std::uint8_t, 5> s{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                                                 static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(e),
                                                                 static_cast<std::uint8_t>(d - a - b - c - e)};
                            states[d].push_back(s);
                            double sum = 0;
                            for (std::size_t o = 0; o < 5; ++o) sum += s[o] * step[o];
                            negative[d].push_back(sum < -kNegTol ? 1 : 0);
                        }
        }
        std::vector<std::uint32_t> index(side * side * side * side, 0);
        for (std::size_t d = 0; d < n; ++d) {
            for (std::size_t i = 0; i < states[d + 1].size(); ++i) index[key(states[d + 1][i])] = static_cast<std::uint32_t>(i);
            next[d].resize(states[d].size());
            for (std::size_t i = 0; i < states[d].size(); ++i) {
                for (std::size_t o = 0; o < 5; ++o) {
                    auto s = states[d][i];
                    ++s[o];
                    next[d][i][o] = index[key(s)];
                }
            }
        }
    }
};

struct CommittedSearch {
    const StepDistribution& d;
    const Lattice& lat;
    int n_max;
    MemoryBoundResult& out;
    std::array<int, 4> plan{};

    void run(std::size_t depth, std::size_t cmin, const std::vector<double>& dist) {
        for (std::size_t c = cmin; c < 4; ++c) {
            std::vector<double> nd(lat.states[depth + 1].size(), 0.0);
            for (std::size_t i = 0; i < dist.size(); ++i) {
                const double p = dist[i];
                if (p == 0) continue;
                for (std::size_t o = 0; o < 5; ++o) {
                    const double po = d.prob[c][o];
                    if (po > 0) nd[lat.next[depth][i][o]] += p * po;
                }
            }
            double left = 0;
            for (std::size_t i = 0; i < nd.size(); ++i)
                if (lat.negative[depth + 1][i]) left += nd[i];
            ++plan[c];
            if (left > out.p_left[depth]) {
                out.p_left[depth] = left;
                out.best_plan[depth] = plan;
            }
            if (static_cast<int>(depth + 1) < n_max) run(depth + 1, c, nd);
            --plan[c];
        }
    }
};

// Same search with the running sum discretized on a uniform grid.
struct GridSearch {
    const StepDistribution& d;
    int n_max;
    double h;
    std::array<long, 5> shift{};
    long lo_step = 0, hi_step = 0;
    MemoryBoundResult& out;
    std::array<int, 4> plan{};

    // dist covers grid indices [depth*lo_step, depth*hi_step]
    void run(std::size_t depth, std::size_t cmin, const std::vector<double>& dist) {
        const long base = static_cast<long>(depth) * lo_step;
        const long nbase = static_cast<long>(depth + 1) * lo_step;
        const auto nsize = static_cast<std::size_t>(static_cast<long>(depth + 1) * (hi_step - lo_step) + 1);
        for (std::size_t c = cmin; c < 4; ++c) {
            std::vector<double> nd(nsize, 0.0);
            for (std::size_t i = 0; i < dist.size(); ++i) {
                const double p = dist[i];
                if (p == 0) continue;
                for (std::size_t o = 0; o < 5; ++o) {
                    const double po = d.prob[c][o];
                    if (po > 0) nd[static_cast<std::size_t>(base + static_cast<long>(i) + shift[o] - nbase)] += p * po;
                }
            }
            const double band = static_cast<double>(depth + 1) * 0.5 * h + h;
            double left = 0, ambiguous = 0;
            for (std::size_t i = 0; i < nd.size(); ++i) {
                const double s = static_cast<double>(nbase + static_cast<long>(i)) * h;
                if (s < -kNegTol) left += nd[i];
                if (std::fabs(s) <= band) ambiguous += nd[i];
            }
            ++plan[c];
            if (left > out.p_left[depth]) {
                out.p_left[depth] = left;
                out.best_plan[depth] = plan;
            }
            out.error_bound = std::max(out.error_bound, ambiguous);
            if (static_cast<int>(depth + 1) < n_max) run(depth + 1, c, nd);
            --plan[c];
        }
    }
};

}  // namespace

StepDistribution StepDistribution::from(const std::array<double, 4>& q, const std::array<double, 4>& eps) {
    double eps_bar = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (!(q[k] > 0)) throw DataError("step distribution needs every setting frequency > 0");
        if (!(eps[k] >= 0 && eps[k] < 1)) throw DataError("step distribution needs eps in [0,1)");
        eps_bar += eps[k] / (1 - eps[k]);
    }
    StepDistribution d;
    for (std::size_t k = 0; k < 4; ++k) d.step[k] = 1 / (q[k] * (1 - eps[k])) - (3 + eps_bar);
    d.step[4] = -(3 + eps_bar);
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t k = 0; k < 4; ++k) d.prob[c][k] = k == c ? q[k] * eps[k] : q[k];
        d.prob[c][4] = q[c] * (1 - eps[c]);
    }
    return d;
}

double StepDistribution::expected_step(std::size_t c) const {
    double s = 0;
    for (std::size_t o = 0; o < 5; ++o) s += prob[c][o] * step[o];
    return s;
}

double p_left_single(const StepDistribution& d) {
    double best = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        double s = 0;
        for (std::size_t o = 0; o < 5; ++o)
            if (d.step[o] < -kNegTol) s += d.prob[c][o];
        best = std::max(best, s);
    }
    return best;
}

MemoryBoundResult memory_bound(const StepDistribution& d, const MemoryBoundOptions& opt) {
    if (opt.n_max < 1) throw DomainError("memory bound needs n_max >= 1");
    if (opt.n_max > 250) throw DomainError("memory bound n_max above 250 is not supported");
    MemoryBoundResult out;
    out.model = opt.model;
    const auto n = static_cast<std::size_t>(opt.n_max);
    out.p_left.assign(n, 0.0);
    out.best_plan.assign(n, {0, 0, 0, 0});

    const std::size_t states = binom(n + 4, 4);
    if (states > opt.max_states) {
        if (opt.model == PlanModel::adaptive) {
            throw DomainError("adaptive memory bound: state space of " + std::to_string(states) + " exceeds the limit");
        }
        out.grid_fallback = true;
        double min_abs = std::numeric_limits<double>::infinity();
        for (double s : d.step)
            if (std::fabs(s) > 0) min_abs = std::min(min_abs, std::fabs(s));
        GridSearch g{d, opt.n_max, opt.grid_fraction * min_abs, {}, 0, 0, out, {}};
        for (std::size_t o = 0; o < 5; ++o) g.shift[o] = std::lround(d.step[o] / g.h);
        g.lo_step = std::min(0L, *std::min_element(g.shift.begin(), g.shift.end()));
        g.hi_step = std::max(0L, *std::max_element(g.shift.begin(), g.shift.end()));
        g.run(0, 0, std::vector<double>{1.0});
    } else {
        const Lattice lat(opt.n_max, d.step);
        if (opt.model == PlanModel::committed) {
            CommittedSearch s{d, lat, opt.n_max, out, {}};
            s.run(0, 0, std::vector<double>{1.0});
        } else {
            for (std::size_t m = 1; m <= n; ++m) {
                std::vector<double> v(lat.states[m].size());
                for (std::size_t i = 0; i < v.size(); ++i) v[i] = lat.negative[m][i];
                for (std::size_t depth = m; depth-- > 0;) {
                    std::vector<double> u(lat.states[depth].size(), 0.0);
                    for (std::size_t i = 0; i < u.size(); ++i) {
                        double best = 0;
                        for (std::size_t c = 0; c < 4; ++c) {
                            double t = 0;
                            for (std::size_t o = 0; o < 5; ++o) t += d.prob[c][o] * v[lat.next[depth][i][o]];
                            best = std::max(best, t);
                        }
                        u[i] = best;
                    }
                    v = std::move(u);
                }
                out.p_left[m - 1] = v[0];
            }
        }
    }
    const auto it = std::max_element(out.p_left.begin(), out.p_left.end());
    out.B = *it;
    out.argmax_n = static_cast<int>(it - out.p_left.begin()) + 1;
    return out;
}

}  // namespace cosmicbell::signif
