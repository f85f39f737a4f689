#pragma once

#include <cstddef>
#include <vector>

namespace cosmicbell::cosmo {

struct CosmologyParams;

// Monotone map eta <-> a over (a_min, 1], from integrating da/deta = a^2 E(a)
// with an adaptive Dormand-Prince stepper and dense output onto a uniform eta grid.
// Between nodes a(eta) is cubic Hermite using the exact derivative; below a_min
// the radiation+matter closed form a = sqrt(Or) eta + (Om/4) eta^2 is used.
class ScaleFactorTable {
public:
    static ScaleFactorTable build(const CosmologyParams& p, double a_min = 1e-6,
                                  std::size_t nodes = 8193, double rtol = 1e-13);

    double a_of_eta(double eta) const;
    double eta_of_a(double a) const;

    double eta0() const { return eta_.back(); }
    double eta_min() const { return eta_.front(); }
    double a_min() const { return a_.front(); }
    std::size_t size() const { return eta_.size(); }
    double rtol() const { return rtol_; }

private:
    double hermite(std::size_t k, double eta) const;

    std::vector<double> eta_;
    std::vector<double> a_;
    std::vector<double> da_;
    double sqrt_or_ = 0.0;
    double om_quarter_ = 0.0;
    double rtol_ = 0.0;
};

}  // namespace cosmicbell::cosmo
