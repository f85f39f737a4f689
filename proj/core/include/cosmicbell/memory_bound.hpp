#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace cosmicbell::signif {

// Single-trial random walk of W - <W> seen by an adversary who commits to a losing pair.
// Outcomes 0..3 are wins on cells 11, 12, 21, 22; outcome 4 is a loss.
struct StepDistribution {
    std::array<double, 5> step{};
    std::array<std::array<double, 5>, 4> prob{};  // [candidate losing pair][outcome]

    static StepDistribution from(const std::array<double, 4>& q, const std::array<double, 4>& eps);
    double expected_step(std::size_t candidate) const;
};

enum class PlanModel {
    committed,  // multiset of losing pairs fixed in advance
    adaptive,   // choice may depend on the running sum
};

struct MemoryBoundOptions {
    int n_max = 20;
    PlanModel model = PlanModel::committed;
    std::size_t max_states = 30000;  // count vectors at depth n_max before the grid fallback
    double grid_fraction = 1e-3;      // grid step as a fraction of the smallest |step|
};

struct MemoryBoundResult {
    double B = 0;
    int argmax_n = 1;
    std::vector<double> p_left;  // index n-1
    std::vector<std::array<int, 4>> best_plan;  // losing-pair multiplicities per n (committed only)
    PlanModel model = PlanModel::committed;
    bool grid_fallback = false;
    double error_bound = 0;
};

// max over candidates of P(step < 0) for one trial.
double p_left_single(const StepDistribution& d);

MemoryBoundResult memory_bound(const StepDistribution& d, const MemoryBoundOptions& opt = {});

}  // namespace cosmicbell::signif
