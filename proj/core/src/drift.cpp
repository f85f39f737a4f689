#include "cosmicbell/events.hpp"

#include <algorithm>
#include <cmath>

namespace cosmicbell::events {

namespace {

struct Histogram {
    double centre = 0;  // offset at the middle of the histogram
    double bin = 0;
    std::vector<double> counts;

    double offset_of(double idx) const {
        const double half = static_cast<double>(counts.size() / 2);
        return centre + (idx - half) * bin;
    }
};

// Differences a - (b + predicted(b)) for b in [b_lo, b_hi), binned over +-scan.
template <class Pred>
Histogram correlate(std::span<const std::uint64_t> t_a, std::span<const std::uint64_t> t_b, std::size_t b_lo,
                    std::size_t b_hi, Pred predicted, double scan_ps, double bin_ps) {
    Histogram h;
    h.bin = bin_ps;
    const auto half = static_cast<std::size_t>(std::ceil(scan_ps / bin_ps));
    h.counts.assign(2 * half + 1, 0.0);
    std::size_t j = 0;
    for (std::size_t k = b_lo; k < b_hi; ++k) {
        const double shifted = static_cast<double>(t_b[k]) + predicted(t_b[k]);
        const double lo = shifted - scan_ps;
        while (j < t_a.size() && static_cast<double>(t_a[j]) < lo) ++j;
        for (std::size_t m = j; m < t_a.size(); ++m) {
            const double d = static_cast<double>(t_a[m]) - shifted;
            if (d > scan_ps) break;
            const auto idx = static_cast<long>(std::floor(d / bin_ps + 0.5)) + static_cast<long>(half);
            if (idx >= 0 && idx < static_cast<long>(h.counts.size())) h.counts[static_cast<std::size_t>(idx)] += 1.0;
        }
    }
    return h;
}

struct Peak {
    bool locked = false;
    double offset = 0;  // relative to the histogram centre
    double height = 0;
    double background = 0;
};

Peak find_peak(const Histogram& h, double min_ratio, long min_region) {
    Peak p;
    const auto it = std::max_element(h.counts.begin(), h.counts.end());
    const long n = static_cast<long>(h.counts.size());
    const long imax = it - h.counts.begin();
    p.height = *it;

    double bsum = 0;
    long bn = 0;
    for (long i = 0; i < n; ++i) {
        if (std::labs(i - imax) > min_region) {
            bsum += h.counts[static_cast<std::size_t>(i)];
            ++bn;
        }
    }
    p.background = bn > 0 ? bsum / static_cast<double>(bn) : 0.0;
    p.locked = p.height >= min_ratio && p.height > min_ratio * p.background;
    if (!p.locked) return p;

    // Grow a contiguous region of clearly elevated bins (a smeared peak is box-like),
    // tolerating single-bin dips, then take the background-subtracted centroid.
    const double thresh = p.background + 3.0 * std::sqrt(std::max(p.background, 1.0));
    long lo = imax, hi = imax;
    auto elevated = [&](long i) { return i >= 0 && i < n && h.counts[static_cast<std::size_t>(i)] > thresh; };
    while (elevated(lo - 1) || elevated(lo - 2)) lo -= elevated(lo - 1) ? 1 : 2;
    while (elevated(hi + 1) || elevated(hi + 2)) hi += elevated(hi + 1) ? 1 : 2;
    lo = std::max(0L, std::min(lo, imax - min_region));
    hi = std::min(n - 1, std::max(hi, imax + min_region));
    double w = 0, wx = 0;
    for (long i = lo; i <= hi; ++i) {
        const double c = std::max(0.0, h.counts[static_cast<std::size_t>(i)] - p.background);
        w += c;
        wx += c * static_cast<double>(i);
    }
    const double centroid = w > 0 ? wx / w : static_cast<double>(imax);
    p.offset = h.offset_of(centroid) - h.centre;
    return p;
}

}  // namespace

double DriftModel::offset_at(std::int64_t t) const {
    if (offsets_ps.empty()) return 0.0;
    if (offsets_ps.size() == 1) return offsets_ps.front();
    const double x = (static_cast<double>(t - origin_ps) / static_cast<double>(block_ps)) - 0.5;
    if (x <= 0) return offsets_ps.front();
    const double last = static_cast<double>(offsets_ps.size() - 1);
    if (x >= last) return offsets_ps.back();
    const auto k = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(k);
    return offsets_ps[k] * (1 - f) + offsets_ps[k + 1] * f;
}

std::int64_t DriftModel::apply(std::uint64_t t_b) const {
    const auto t = static_cast<std::int64_t>(t_b);
    return t + std::llround(offset_at(t));
}

double DriftModel::slope() const {
    if (offsets_ps.size() < 2) return 0.0;
    return (offsets_ps.back() - offsets_ps.front()) /
           (static_cast<double>(block_ps) * static_cast<double>(offsets_ps.size() - 1));
}

bool DriftModel::is_zero() const {
    return std::all_of(offsets_ps.begin(), offsets_ps.end(), [](double o) { return o == 0.0; });
}

void DriftModel::validate() const {
    if (block_ps <= 0) throw DataError("drift model block length must be positive");
    for (std::size_t k = 1; k < offsets_ps.size(); ++k) {
        if (std::fabs(offsets_ps[k] - offsets_ps[k - 1]) / static_cast<double>(block_ps) >= 1e-4)
            throw DataError("drift model slope exceeds the 1e-4 sanity bound");
    }
}

DriftModel DriftModel::negated() const {
    DriftModel m = *this;
    for (double& o : m.offsets_ps) o = -o;
    return m;
}

DriftModel estimate_clock_drift(std::span<const std::uint64_t> t_a, std::span<const std::uint64_t> t_b,
                                const DriftOptions& opt) {
    if (t_a.empty() || t_b.empty()) throw DataError("clock drift: both streams must be non-empty");
    if (t_a.back() < t_b.front() || t_b.back() < t_a.front())
        throw DataError("clock drift: streams do not overlap in time");
    if (!(opt.block_s > 0) || !(opt.window_scan_ns > 0) || !(opt.coarse_bin_ps > 0) || !(opt.fine_bin_ps > 0))
        throw DomainError("clock drift: options must be positive");

    DriftModel m;
    m.origin_ps = static_cast<std::int64_t>(t_b.front());
    m.block_ps = std::llround(opt.block_s * 1e12);
    const std::uint64_t span = t_b.back() - t_b.front();
    const std::size_t nblocks = std::max<std::size_t>(1, static_cast<std::size_t>(span / static_cast<std::uint64_t>(m.block_ps)) + 1);

    std::vector<std::size_t> bounds(nblocks + 1);
    for (std::size_t k = 0; k <= nblocks; ++k) {
        const std::uint64_t edge = t_b.front() + k * static_cast<std::uint64_t>(m.block_ps);
        bounds[k] = static_cast<std::size_t>(std::lower_bound(t_b.begin(), t_b.end(), edge) - t_b.begin());
    }
    bounds[nblocks] = t_b.size();

    // Coarse pass: track the offset block by block, predicting each block from the previous two.
    const double scan = opt.window_scan_ns * 1e3;
    std::vector<bool> have(nblocks, false);
    m.offsets_ps.assign(nblocks, 0.0);
    double prev = 0.0, prev2 = 0.0;
    int seen = 0;
    for (std::size_t k = 0; k < nblocks; ++k) {
        const double pred = seen >= 2 ? 2 * prev - prev2 : prev;
        if (bounds[k + 1] == bounds[k]) {
            m.offsets_ps[k] = pred;
            continue;
        }
        auto h = correlate(t_a, t_b, bounds[k], bounds[k + 1], [pred](std::uint64_t) { return pred; }, scan,
                           opt.coarse_bin_ps);
        h.centre = pred;
        const Peak pk = find_peak(h, opt.min_peak_ratio, 2);
        if (!pk.locked) {
            throw NoLockError("clock drift: no coincidence peak above " + std::to_string(opt.min_peak_ratio) +
                              "x background in block " + std::to_string(k) + " (peak " +
                              std::to_string(pk.height) + ", background " + std::to_string(pk.background) + ")");
        }
        m.offsets_ps[k] = pred + pk.offset;
        have[k] = true;
        prev2 = prev;
        prev = m.offsets_ps[k];
        ++seen;
    }

    // Fine pass: residuals against the piecewise-linear coarse model.
    DriftModel coarse = m;
    const double fine_scan = 4.0 * opt.coarse_bin_ps;
    for (std::size_t k = 0; k < nblocks; ++k) {
        if (!have[k]) continue;
        auto h = correlate(t_a, t_b, bounds[k], bounds[k + 1],
                           [&coarse](std::uint64_t t) { return coarse.offset_at(static_cast<std::int64_t>(t)); },
                           fine_scan, opt.fine_bin_ps);
        h.centre = 0.0;
        const Peak pk = find_peak(h, opt.min_peak_ratio, 3);
        if (pk.locked) m.offsets_ps[k] += pk.offset;
    }
    m.validate();
    return m;
}

}  // namespace cosmicbell::events
