#pragma once

#include <array>
#include <string>
#include <vector>

namespace cosmicbell::predict {

// Port 0 is red (setting 1), port 1 is blue (setting 2).
struct PortRates {
    double signal_cps = 0;
    double noise_cps = 0;
    double noise_duration_s = 300;
    double f_wrongway = 0;  // fraction of this port's cosmic photons landing in the other port
};

struct SideRates {
    std::array<PortRates, 2> ports{};
};

struct RateMeasurement {
    SideRates a;
    SideRates b;
    void validate() const;
};

struct ValueSigma {
    double value = 0;
    double sigma = 0;
};

struct PredictabilityTable {
    std::array<ValueSigma, 2> eps_a{};
    std::array<ValueSigma, 2> eps_b{};
    std::array<ValueSigma, 4> eps_ij{};  // 11, 12, 21, 22
    ValueSigma eps_max;
    bool average_based = true;
};

// Total detected rate of a port: (1 - f_i) s_i + f_i' s_i' + n_i.
double port_rate(const SideRates& side, int port);

// (n_i + f_i' s_i') / r_i with sigma sqrt(n_i/T)/r_i.
ValueSigma port_predictability(const SideRates& side, int port, const char* side_label = "?");

void joint_predictability(PredictabilityTable& table);

PredictabilityTable excess_predictability(const RateMeasurement& rates);

// Conservative run-level table from time-resolved rate rows: per-port maxima.
PredictabilityTable excess_predictability(const std::vector<RateMeasurement>& rows);

PredictabilityTable table_from_ports(const std::array<ValueSigma, 2>& eps_a, const std::array<ValueSigma, 2>& eps_b);

struct VisibilityConstraint {
    double threshold = 0;  // V sqrt2 - 1
    bool violation_possible = false;
};

VisibilityConstraint visibility_constraint(double visibility);

// CSV columns: side,port,signal_cps,noise_cps,noise_duration_s,f_wrongway.
// Ports are "red"/"blue" or 1/2. Repeated (side, port) rows form a time series.
std::vector<RateMeasurement> read_rates_csv(const std::string& path);
std::vector<RateMeasurement> parse_rates_csv(const std::string& text, const std::string& origin = "rates");

}  // namespace cosmicbell::predict
