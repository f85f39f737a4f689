#pragma once

#include "cosmicbell/chsh.hpp"
#include "cosmicbell/memory_bound.hpp"
#include "cosmicbell/predict.hpp"

#include <array>
#include <string>

namespace cosmicbell::signif {

struct EpsilonInputs {
    std::array<double, 4> eps_ij{};
    std::array<double, 2> eps_a{};
    std::array<double, 2> eps_b{};
    std::array<double, 2> sigma_a{};
    std::array<double, 2> sigma_b{};

    static EpsilonInputs from_table(const predict::PredictabilityTable& t);
    void validate() const;
};

struct SignificanceInput {
    chsh::CoincidenceCounts counts;
    EpsilonInputs eps;
};

struct ExpectedW {
    double expected_W = 0;
    double eps_bar = 0;
};

struct OptimalFractions {
    std::array<double, 4> f{};
    bool clamped = false;  // simplex projection was needed
};

struct NuChain {
    double nu_bar = 0;
    double delta_nu = 0;
    double nu_n = 0;
    double p_cond = 0;
    double log10_p_cond = 0;
    double p_no_mem = 0;
    double log10_p_no_mem = 0;
    double nu_no_mem = 0;
    std::array<double, 4> E_cal{};
};

struct FinalP {
    double p = 0;
    double log10_p = 0;
    double nu = 0;
};

struct SignificanceReport {
    std::array<double, 4> q{};
    std::array<double, 4> wins{};
    double N = 0;
    double W = 0;
    ExpectedW expected;
    OptimalFractions f_opt;
    double sigma_W_opt = 0;
    NuChain nu;
    MemoryBoundResult memory;
    FinalP final;
    bool violation = false;  // W above its local-realist expectation
};

std::array<double, 4> setting_frequencies(const chsh::CoincidenceCounts& c);

double win_statistic(const SignificanceInput& in);
ExpectedW expected_W(const SignificanceInput& in);
OptimalFractions optimal_fractions(const SignificanceInput& in);
double sigma_W_opt(const SignificanceInput& in);
NuChain nu_chain(const SignificanceInput& in, double W, double expected_w, double sigma);
FinalP final_p(double log10_p_no_mem, double B);

SignificanceReport analyze(const SignificanceInput& in, const MemoryBoundOptions& mem = {});

}  // namespace cosmicbell::signif
