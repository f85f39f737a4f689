#include "cosmicbell/predict.hpp"

#include "cosmicbell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace cosmicbell::predict {

namespace {

void check_port(const PortRates& p, const std::string& where) {
    if (!(p.signal_cps >= 0) || !(p.noise_cps >= 0)) throw DataError(where + ": rates must be >= 0");
    if (!(p.f_wrongway >= 0 && p.f_wrongway <= 1)) throw DataError(where + ": wrong-way fraction outside [0,1]");
    if (!(p.noise_duration_s > 0)) throw DataError(where + ": noise duration must be > 0");
}

ValueSigma quad_sum(ValueSigma x, ValueSigma y) {
    return {std::min(1.0, x.value + y.value), std::hypot(x.sigma, y.sigma)};
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

void RateMeasurement::validate() const {
    const char* names[2] = {"red", "blue"};
    for (int k = 0; k < 2; ++k) {
        check_port(a.ports[static_cast<std::size_t>(k)], std::string("A ") + names[k]);
        check_port(b.ports[static_cast<std::size_t>(k)], std::string("B ") + names[k]);
    }
}

double port_rate(const SideRates& side, int port) {
    const auto& me = side.ports[static_cast<std::size_t>(port)];
    const auto& other = side.ports[static_cast<std::size_t>(1 - port)];
    return (1 - me.f_wrongway) * me.signal_cps + other.f_wrongway * other.signal_cps + me.noise_cps;
}

ValueSigma port_predictability(const SideRates& side, int port, const char* side_label) {
    if (port != 0 && port != 1) throw DomainError("port index must be 0 (red) or 1 (blue)");
    const auto& me = side.ports[static_cast<std::size_t>(port)];
    const auto& other = side.ports[static_cast<std::size_t>(1 - port)];
    const double r = port_rate(side, port);
    if (!(r > 0)) {
        throw DataError(std::string("zero total rate at ") + side_label + (port == 0 ? " red" : " blue") + " port");
    }
    ValueSigma e;
    e.value = std::min(1.0, (me.noise_cps + other.f_wrongway * other.signal_cps) / r);
    e.sigma = std::sqrt(me.noise_cps / me.noise_duration_s) / r;
    return e;
}

void joint_predictability(PredictabilityTable& t) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            t.eps_ij[static_cast<std::size_t>(2 * i + j)] = quad_sum(t.eps_a[static_cast<std::size_t>(i)], t.eps_b[static_cast<std::size_t>(j)]);
    auto by_value = [](const ValueSigma& x, const ValueSigma& y) { return x.value < y.value; };
    const ValueSigma ma = *std::max_element(t.eps_a.begin(), t.eps_a.end(), by_value);
    const ValueSigma mb = *std::max_element(t.eps_b.begin(), t.eps_b.end(), by_value);
    t.eps_max = quad_sum(ma, mb);
}

PredictabilityTable table_from_ports(const std::array<ValueSigma, 2>& eps_a, const std::array<ValueSigma, 2>& eps_b) {
    PredictabilityTable t;
    t.eps_a = eps_a;
    t.eps_b = eps_b;
    for (const auto& e : eps_a)
        if (!(e.value >= 0 && e.value <= 1)) throw DataError("eps_a outside [0,1]");
    for (const auto& e : eps_b)
        if (!(e.value >= 0 && e.value <= 1)) throw DataError("eps_b outside [0,1]");
    joint_predictability(t);
    return t;
}

PredictabilityTable excess_predictability(const RateMeasurement& rates) {
    rates.validate();
    PredictabilityTable t;
    for (int k = 0; k < 2; ++k) {
        t.eps_a[static_cast<std::size_t>(k)] = port_predictability(rates.a, k, "A");
        t.eps_b[static_cast<std::size_t>(k)] = port_predictability(rates.b, k, "B");
    }
    joint_predictability(t);
    t.average_based = true;
    return t;
}

PredictabilityTable excess_predictability(const std::vector<RateMeasurement>& rows) {
    if (rows.empty()) throw DataError("no rate measurements");
    if (rows.size() == 1) return excess_predictability(rows.front());
    PredictabilityTable t;
    for (const auto& r : rows) {
        const PredictabilityTable one = excess_predictability(r);
        for (std::size_t k = 0; k < 2; ++k) {
            if (one.eps_a[k].value > t.eps_a[k].value) t.eps_a[k] = one.eps_a[k];
            if (one.eps_b[k].value > t.eps_b[k].value) t.eps_b[k] = one.eps_b[k];
        }
    }
    joint_predictability(t);
    t.average_based = false;
    return t;
}

VisibilityConstraint visibility_constraint(double v) {
    if (!(v >= 0 && v <= 1)) throw DomainError("visibility must be within [0,1]");
    VisibilityConstraint c;
    c.threshold = v * std::sqrt(2.0) - 1;
    c.violation_possible = c.threshold > 0;
    return c;
}

std::vector<RateMeasurement> parse_rates_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    // (side, port) -> successive rows
    std::map<std::pair<int, int>, std::vector<PortRates>> series;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("side", 0) == 0) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(trim(cell));
        const std::string where = origin + ":" + std::to_string(lineno);
        if (f.size() < 4) throw DataError(where + ": expected side,port,signal_cps,noise_cps[,noise_duration_s,f_wrongway]");
        int side = -1, port = -1;
        if (f[0] == "A" || f[0] == "a") side = 0;
        if (f[0] == "B" || f[0] == "b") side = 1;
        if (f[1] == "red" || f[1] == "1") port = 0;
        if (f[1] == "blue" || f[1] == "2") port = 1;
        if (side < 0 || port < 0) throw DataError(where + ": unknown side/port '" + f[0] + "," + f[1] + "'");
        PortRates p;
        try {
            p.signal_cps = std::stod(f[2]);
            p.noise_cps = std::stod(f[3]);
            if (f.size() > 4 && !f[4].empty()) p.noise_duration_s = std::stod(f[4]);
            if (f.size() > 5 && !f[5].empty()) p.f_wrongway = std::stod(f[5]);
        } catch (const std::exception&) {
            throw DataError(where + ": bad number");
        }
        check_port(p, where);
        series[{side, port}].push_back(p);
    }
    if (series.size() != 4) throw DataError(origin + ": need rows for A/B red/blue");
    std::size_t rows = 0;
    for (const auto& [key, v] : series) rows = std::max(rows, v.size());
    std::vector<RateMeasurement> out(rows);
    for (const auto& [key, v] : series) {
        for (std::size_t r = 0; r < rows; ++r) {
            const PortRates& p = v[std::min(r, v.size() - 1)];
            SideRates& s = key.first == 0 ? out[r].a : out[r].b;
            s.ports[static_cast<std::size_t>(key.second)] = p;
        }
    }
    return out;
}

std::vector<RateMeasurement> read_rates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open rates file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rates_csv(ss.str(), path);
}

}  // namespace cosmicbell::predict
