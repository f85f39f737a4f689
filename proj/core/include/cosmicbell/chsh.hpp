#pragma once

#include "cosmicbell/events.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace cosmicbell::chsh {

// Cells ordered 11, 12, 21, 22; outcomes ordered ++, +-, -+, --.
struct CoincidenceCounts {
    std::array<std::array<std::uint64_t, 4>, 4> n{};

    static constexpr std::size_t cell(int i, int j) { return static_cast<std::size_t>((i - 1) * 2 + (j - 1)); }
    static constexpr std::size_t outcome(int a, int b) { return static_cast<std::size_t>((a > 0 ? 0 : 2) + (b > 0 ? 0 : 1)); }
    static const char* cell_label(std::size_t c);

    std::uint64_t& at(int i, int j, int a, int b) { return n[cell(i, j)][outcome(a, b)]; }
    std::uint64_t at(int i, int j, int a, int b) const { return n[cell(i, j)][outcome(a, b)]; }
    std::uint64_t cell_total(std::size_t c) const;
    std::uint64_t total() const;
    std::uint64_t equal(std::size_t c) const { return n[c][0] + n[c][3]; }
    std::uint64_t unequal(std::size_t c) const { return n[c][1] + n[c][2]; }

    // Win counts: A != B in cells 11, 12, 21 and A == B in cell 22.
    std::array<std::uint64_t, 4> wins() const;

    // Same table with every A outcome flipped.
    CoincidenceCounts flip_a() const;

    friend bool operator==(const CoincidenceCounts&, const CoincidenceCounts&) = default;
};

CoincidenceCounts tabulate(std::span<const events::TrialRecord> trials);

// "setting,pp,pm,mp,mm" header, rows 11,12,21,22. A bare 4x4 block is also accepted.
CoincidenceCounts read_counts_csv(const std::string& path);
CoincidenceCounts parse_counts_csv(const std::string& text, const std::string& origin = "counts");
void write_counts_csv(const std::string& path, const CoincidenceCounts& c);

struct CorrelationReport {
    std::array<double, 4> p_equal{};  // p(A=B | ij)
    std::array<double, 4> E{};
    double C = 0;
    double S = 0;
    double V = 0;
};

CorrelationReport correlations(const CoincidenceCounts& counts);

struct SettingsStats {
    std::array<double, 4> q{};
    std::array<double, 2> p_a{};
    std::array<double, 2> p_b{};
    std::array<double, 4> p_factorized{};
    double chi2 = 0;
    double p_value = 1;
    int dof = 1;
};

SettingsStats settings_independence(const CoincidenceCounts& counts);

struct ProportionTest {
    std::string label;  // e.g. "A+|a1 bj"
    double p1 = 0;
    double p2 = 0;
    double z = 0;
    double p_value = 1;
};

struct NoSignalingReport {
    std::array<double, 4> p_a_plus{};  // p(A=+ | ij), cells 11,12,21,22
    std::array<double, 4> p_b_plus{};  // p(B=+ | ij)
    std::array<ProportionTest, 4> tests{};  // A|a1, A|a2, B|b1, B|b2
    double min_p = 1;
    double aggregate_p = 1;  // 1 - (1 - min p)^8
};

NoSignalingReport no_signaling(const CoincidenceCounts& counts);

}  // namespace cosmicbell::chsh
