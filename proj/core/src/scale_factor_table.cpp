#include "cosmicbell/scale_factor_table.hpp"

#include "cosmicbell/cosmo.hpp"
#include "cosmicbell/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace cosmicbell::cosmo {

namespace odeint = boost::numeric::odeint;

ScaleFactorTable ScaleFactorTable::build(const CosmologyParams& p, double a_min, std::size_t nodes,
                                         double rtol) {
    p.validate();
    if (!(a_min > 0.0 && a_min < 1.0)) throw DomainError("ScaleFactorTable: a_min must be in (0,1)");
    if (nodes < 16) throw DomainError("ScaleFactorTable: need at least 16 nodes");

    ScaleFactorTable t;
    t.rtol_ = rtol;
    t.sqrt_or_ = std::sqrt(p.omega_r);
    t.om_quarter_ = p.omega_m / 4.0;

    const double eta_start = conformal_time_of_a(a_min, p);
    const double eta_end = present_conformal_time(p);

    t.eta_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        t.eta_[k] = eta_start + (eta_end - eta_start) * static_cast<double>(k) / (nodes - 1);
    }
    t.eta_.back() = eta_end;

    using State = std::array<double, 1>;
    auto rhs = [&p](const State& x, State& dxdt, double) {
        const double a = std::max(x[0], 1e-300);
        dxdt[0] = a * a * hubble_E(a, p);
    };
    auto stepper = odeint::make_dense_output(rtol * 1e-3, rtol, odeint::runge_kutta_dopri5<State>());
    State x{a_min};
    t.a_.reserve(nodes);
    odeint::integrate_times(stepper, rhs, x, t.eta_.begin(), t.eta_.end(),
                            (eta_end - eta_start) * 1e-6,
                            [&t](const State& s, double) { t.a_.push_back(s[0]); });
    if (t.a_.size() != nodes) throw InternalError("ScaleFactorTable: integrator skipped nodes");

    t.da_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        if (k > 0 && !(t.a_[k] > t.a_[k - 1])) throw InternalError("ScaleFactorTable: a(eta) not monotone");
        t.da_[k] = t.a_[k] * t.a_[k] * hubble_E(t.a_[k], p);
    }
    return t;
}

double ScaleFactorTable::hermite(std::size_t k, double eta) const {
    const double h = eta_[k + 1] - eta_[k];
    const double s = (eta - eta_[k]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * a_[k] + h10 * h * da_[k] + h01 * a_[k + 1] + h11 * h * da_[k + 1];
}

double ScaleFactorTable::a_of_eta(double eta) const {
    if (eta < 0.0) throw DomainError("a_of_eta: eta must be non-negative");
    if (eta <= eta_.front()) return sqrt_or_ * eta + om_quarter_ * eta * eta;
    if (eta >= eta_.back()) {
        if (eta > eta_.back() * (1 + 1e-12)) throw DomainError("a_of_eta: eta beyond eta0");
        return a_.back();
    }
    const double h = eta_[1] - eta_[0];
    auto k = static_cast<std::size_t>((eta - eta_.front()) / h);
    k = std::min(k, eta_.size() - 2);
    return hermite(k, eta);
}

double ScaleFactorTable::eta_of_a(double a) const {
    if (!(a > 0.0)) throw DomainError("eta_of_a: a must be positive");
    if (a <= a_.front()) {
        // invert the closed form
        if (om_quarter_ == 0.0) return a / sqrt_or_;
        return (-sqrt_or_ + std::sqrt(sqrt_or_ * sqrt_or_ + 4 * om_quarter_ * a)) / (2 * om_quarter_);
    }
    if (a >= a_.back()) return eta_.back();
    auto it = std::upper_bound(a_.begin(), a_.end(), a);
    const std::size_t k = static_cast<std::size_t>(it - a_.begin()) - 1;
    // Newton on the Hermite piece, bracketed by its node interval.
    double lo = eta_[k], hi = eta_[k + 1];
    double eta = lo + (hi - lo) * (a - a_[k]) / (a_[k + 1] - a_[k]);
    for (int iter = 0; iter < 50; ++iter) {
        const double f = hermite(k, eta) - a;
        if (f > 0) hi = eta; else lo = eta;
        const double d = 1e-7 * (eta_[k + 1] - eta_[k]);
        const double slope = (hermite(k, std::min(eta + d, eta_[k + 1])) - hermite(k, std::max(eta - d, eta_[k]))) /
                             (std::min(eta + d, eta_[k + 1]) - std::max(eta - d, eta_[k]));
        double next = eta - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - eta) <= 1e-15 * std::max(1.0, eta)) return next;
        eta = next;
    }
    return eta;
}

}  // namespace cosmicbell::cosmo
