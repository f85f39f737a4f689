#include "cosmicbell/chsh.hpp"

#include "cosmicbell/errors.hpp"
#include "cosmicbell/special.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace cosmicbell::chsh {

namespace {

constexpr const char* kCellLabels[4] = {"11", "12", "21", "22"};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

ProportionTest pooled_z(std::string label, double x1, double n1, double x2, double n2) {
    ProportionTest t;
    t.label = std::move(label);
    t.p1 = x1 / n1;
    t.p2 = x2 / n2;
    const double pooled = (x1 + x2) / (n1 + n2);
    const double se = std::sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2));
    t.z = se > 0 ? (t.p1 - t.p2) / se : 0.0;
    t.p_value = special::two_sided_p(t.z);
    return t;
}

}  // namespace

const char* CoincidenceCounts::cell_label(std::size_t c) { return kCellLabels[c]; }

std::uint64_t CoincidenceCounts::cell_total(std::size_t c) const { return n[c][0] + n[c][1] + n[c][2] + n[c][3]; }

std::uint64_t CoincidenceCounts::total() const {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < 4; ++c) s += cell_total(c);
    return s;
}

std::array<std::uint64_t, 4> CoincidenceCounts::wins() const {
    return {unequal(0), unequal(1), unequal(2), equal(3)};
}

CoincidenceCounts CoincidenceCounts::flip_a() const {
    CoincidenceCounts f;
    for (std::size_t c = 0; c < 4; ++c) f.n[c] = {n[c][2], n[c][3], n[c][0], n[c][1]};
    return f;
}

CoincidenceCounts tabulate(std::span<const events::TrialRecord> trials) {
    CoincidenceCounts c;
    for (const auto& t : trials) {
        if ((t.setting_a != 1 && t.setting_a != 2) || (t.setting_b != 1 && t.setting_b != 2))
            throw DataError("trial with setting outside {1,2}");
        ++c.at(t.setting_a, t.setting_b, t.outcome_a, t.outcome_b);
    }
    return c;
}

CoincidenceCounts parse_counts_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        rows.push_back(fields);
    }
    if (!rows.empty() && !rows[0].empty() && (rows[0][0] == "setting" || rows[0][0] == "ij")) rows.erase(rows.begin());
    if (rows.size() != 4) throw DataError(origin + ": expected 4 count rows (11,12,21,22)");
    CoincidenceCounts c;
    for (std::size_t r = 0; r < 4; ++r) {
        auto& fields = rows[r];
        if (fields.size() == 5) {
            if (fields[0] != kCellLabels[r])
                throw DataError(origin + ": row " + std::to_string(r + 1) + " must be setting " + kCellLabels[r]);
            fields.erase(fields.begin());
        }
        if (fields.size() != 4) throw DataError(origin + ": each row needs 4 counts (++,+-,-+,--)");
        for (std::size_t k = 0; k < 4; ++k) {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(fields[k], &used);
                if (used != fields[k].size() || v < 0) throw std::invalid_argument("neg");
                c.n[r][k] = static_cast<std::uint64_t>(v);
            } catch (const std::exception&) {
                throw DataError(origin + ": bad count '" + fields[k] + "' in row " + kCellLabels[r]);
            }
        }
    }
    return c;
}

CoincidenceCounts read_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open counts file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_counts_csv(ss.str(), path);
}

void write_counts_csv(const std::string& path, const CoincidenceCounts& c) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "setting,pp,pm,mp,mm\n";
    for (std::size_t r = 0; r < 4; ++r) {
        out << kCellLabels[r];
        for (std::size_t k = 0; k < 4; ++k) out << ',' << c.n[r][k];
        out << '\n';
    }
}

CorrelationReport correlations(const CoincidenceCounts& counts) {
    CorrelationReport r;
    for (std::size_t c = 0; c < 4; ++c) {
        const auto tot = counts.cell_total(c);
        if (tot == 0) throw DataError(std::string("undefined correlation: N_") + kCellLabels[c] + " = 0");
        r.p_equal[c] = static_cast<double>(counts.equal(c)) / static_cast<double>(tot);
        r.E[c] = 2 * r.p_equal[c] - 1;
    }
    r.C = -r.p_equal[0] - r.p_equal[1] - r.p_equal[2] + r.p_equal[3];
    r.S = 2 * std::fabs(r.C + 1);
    r.V = r.S / (2 * std::numbers::sqrt2);
    return r;
}

SettingsStats settings_independence(const CoincidenceCounts& counts) {
    SettingsStats s;
    const double n = static_cast<double>(counts.total());
    if (n == 0) throw DataError("settings independence: no coincidences");
    for (std::size_t c = 0; c < 4; ++c) s.q[c] = static_cast<double>(counts.cell_total(c)) / n;
    s.p_a = {s.q[0] + s.q[1], s.q[2] + s.q[3]};
    s.p_b = {s.q[0] + s.q[2], s.q[1] + s.q[3]};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const std::size_t c = CoincidenceCounts::cell(i + 1, j + 1);
            s.p_factorized[c] = s.p_a[static_cast<std::size_t>(i)] * s.p_b[static_cast<std::size_t>(j)];
            if (s.p_factorized[c] == 0)
                throw DataError(std::string("degenerate setting margin: p_") + kCellLabels[c] + " = 0");
        }
    }
    s.chi2 = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        const double d = s.q[c] - s.p_factorized[c];
        s.chi2 += d * d / s.p_factorized[c];
    }
    s.chi2 *= n;
    s.dof = 1;
    s.p_value = special::chi2_sf(s.chi2, s.dof);
    return s;
}

NoSignalingReport no_signaling(const CoincidenceCounts& counts) {
    NoSignalingReport r;
    std::array<double, 4> a_plus{}, b_plus{}, tot{};
    for (std::size_t c = 0; c < 4; ++c) {
        tot[c] = static_cast<double>(counts.cell_total(c));
        if (tot[c] == 0) throw DataError(std::string("no-signaling: empty cell N_") + kCellLabels[c]);
        a_plus[c] = static_cast<double>(counts.n[c][0] + counts.n[c][1]);
        b_plus[c] = static_cast<double>(counts.n[c][0] + counts.n[c][2]);
        r.p_a_plus[c] = a_plus[c] / tot[c];
        r.p_b_plus[c] = b_plus[c] / tot[c];
    }
    // Alice's marginal must not depend on Bob's setting, and vice versa.
    r.tests[0] = pooled_z("A+|a1 bj", a_plus[0], tot[0], a_plus[1], tot[1]);
    r.tests[1] = pooled_z("A+|a2 bj", a_plus[2], tot[2], a_plus[3], tot[3]);
    r.tests[2] = pooled_z("B+|ai b1", b_plus[0], tot[0], b_plus[2], tot[2]);
    r.tests[3] = pooled_z("B+|ai b2", b_plus[1], tot[1], b_plus[3], tot[3]);
    r.min_p = 1;
    for (const auto& t : r.tests) r.min_p = std::min(r.min_p, t.p_value);
    r.aggregate_p = 1 - std::pow(1 - r.min_p, 8);
    return r;
}

}  // namespace cosmicbell::chsh
