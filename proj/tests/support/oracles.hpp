#pragma once

// Independent reference computations used only by tests. None of these call the
// library routine they are compared against.

#include "cosmicbell/chsh.hpp"
#include "cosmicbell/cosmo.hpp"
#include "cosmicbell/geom.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace oracles {

// a(eta) by fixed-step RK4 on da/deta = a^2 E(a), started on the radiation+matter series.
class FriedmannRk4 {
public:
    explicit FriedmannRk4(const cosmicbell::cosmo::CosmologyParams& p, double h = 2e-5);
    double a_of_eta(double eta) const;
    double eta_of_a(double a) const;  // bisection on the tabulated a(eta)
    double eta0() const { return eta0_; }

private:
    double h_;
    double eta_start_;
    double eta0_ = 0;
    std::vector<double> a_;
};

struct McEstimate {
    double value = 0;
    double std_error = 0;
};

// F_excl by sampling the experiment's past light cone with weight a^4 and testing
// membership in the two emission-event cones directly in comoving coordinates.
McEstimate excluded_fraction_mc(const FriedmannRk4& f, double z_a, double z_b, double alpha_deg, std::size_t samples,
                                std::uint64_t seed);

// Length (us) of the set of source emission times for which: the detection at m_k happens
// after the setting signal from r_k arrives, and the detection at m_l (and the emission at s)
// stay outside the future light cone of a distant emission event along n_hat.
double feasible_emission_window_us(const cosmicbell::geom::Vec3& r_k, const cosmicbell::geom::Vec3& m_k,
                                   const cosmicbell::geom::Vec3& m_l, const cosmicbell::geom::Vec3& s,
                                   const cosmicbell::geom::Vec3& n_hat, double n_air, double gamma,
                                   double step_ps = 10.0);

struct SingleTrialBound {
    double p_left = 0;
    int losing_cell = -1;
};

// max over committed losing cells of P(one-trial step < 0).
SingleTrialBound single_trial_p_left(const std::array<double, 4>& q, const std::array<double, 4>& eps);

// Monte Carlo of one trial under a committed losing cell; returns the left-step frequency.
McEstimate adversary_mc(const std::array<double, 4>& q, const std::array<double, 4>& eps, int losing_cell,
                        std::size_t trials, std::uint64_t seed);

// Deterministic local strategy: outcome of A for settings 1,2 and of B for settings 1,2.
struct LocalStrategy {
    std::array<int, 2> a{1, 1};
    std::array<int, 2> b{1, 1};
};
std::vector<LocalStrategy> all_local_strategies();
// a1 b1 + a1 b2 + a2 b1 - a2 b2, always +-2.
int signed_chsh(const LocalStrategy& s);
// Random weights on the strategies whose signed value is `sign` * 2, zero elsewhere.
std::vector<double> saturating_mixture(const std::vector<LocalStrategy>& strategies, int sign, std::uint64_t seed);

// Trials with unbiased random settings; each trial draws a strategy from `weights`.
cosmicbell::chsh::CoincidenceCounts local_counts(const std::vector<LocalStrategy>& strategies,
                                                 const std::vector<double>& weights, std::size_t trials,
                                                 std::uint64_t seed);

}  // namespace oracles
