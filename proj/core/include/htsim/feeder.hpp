#pragma once

#include "htsim/channels.hpp"
#include "htsim/rng.hpp"

#include <vector>

namespace htsim {

// Deterministic FSO link budget factors; the aggregate path gain is
// gain() = Gt * Gr * eta_p * ell_s.
struct FsoPathLoss {
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double pointing = 1.0;   // pointing loss factor in (0,1]
    double free_space = 1.0; // free-space loss factor in (0,1]

    double gain() const { return tx_gain * rx_gain * pointing * free_space; }
    void validate() const;
};

struct FsoGateway {
    FsoPathLoss path;
    MalagaParams turbulence;
};

// Feeder-link configuration: one gateway (single link) or two gateways
// (orthogonal space-time block code, SNR = sum of squared irradiances).
struct FeederConfig {
    double tx_power = 1.0;    // W
    double oe_coeff = 0.8;    // optical-to-electrical conversion
    double noise_power = 1.0; // W
    std::vector<FsoGateway> gateways;

    // average SNR of gateway i: P (eta * path gain)^2 / N0
    double avg_snr(int i) const;
    void validate() const;
};

// Nodes/weights of the capacity quadrature sum over (0, inf).
struct QuadratureSpec {
    int order = 30;
    void validate() const;
};
struct CapacityNodes {
    std::vector<double> s;      // abscissae S_t
    std::vector<double> weight; // weights V_t
};
CapacityNodes capacity_quadrature(const QuadratureSpec& q);

// Instantaneous combined SNR P eta^2 (I1^2 + I2^2) / N0.
double stbc_snr(double irradiance1, double irradiance2, const FeederConfig& cfg);

// MGF of gamma = gamma_bar * (I^a)^2 under Malaga turbulence, and its
// derivative in s; both in closed form through G^{1,4}_{4,1}.
double mgf_gamma1(double s, double gamma_bar, const MalagaParams& p);
double mgf_gamma1_deriv(double s, double gamma_bar, const MalagaParams& p);

struct FeederCapacityResult {
    double value = 0;              // bits/s/Hz
    int order = 0;                 // quadrature order used
    double convergence_estimate = 0; // |C(T) - C(T/2)|
    bool accuracy_warning = false; // convergence estimate above 1% of value
};

// Ergodic capacity of the feeder link from the MGF quadrature; two gateways
// use the product rule M1 M2' + M2 M1', a single gateway reduces to M'.
FeederCapacityResult feeder_capacity(const FeederConfig& cfg, const QuadratureSpec& q);

struct McEstimate {
    double mean = 0;
    double std_error = 0;
    long n = 0;
};

// Monte Carlo oracle: sample mean of log2(1 + gamma_1) over independent
// Malaga draws.
McEstimate feeder_capacity_mc(const RngStream& rng, const FeederConfig& cfg, long n);

} // namespace htsim
