#pragma once

#include "htsim/beamforming.hpp"
#include "htsim/channels.hpp"
#include "htsim/feeder.hpp"
#include "htsim/rng.hpp"

#include <map>
#include <string>
#include <vector>

namespace htsim {

// Per-user inputs of the user-link capacity closed form. phi_x collects the
// total received beam power over noise, phi_y the interference-only part;
// lambda_x / lambda_y are the mapped truncation thresholds.
struct UserCapacityInputs {
    double phi_x = 0;
    double phi_y = 0;
    double lambda_x = 0;
    double lambda_y = 0;
    ShadowedRicianParams fading;
    int user = 0;
    bool feasible = true; // false when the SINR threshold is unreachable
};

// Truncated log moment int_Lambda^inf ln(1+x) f_{phi |rho|^2}(x) dx (nats),
// assembled from the CDF tail terms and exponentially weighted denominator
// integrals psi_q.
double truncated_log_moment(const ShadowedRicianParams& p, double phi, double lambda);

struct UserLinkCapacity {
    double total = 0; // bits/s/Hz
    std::vector<double> per_user;
};

UserLinkCapacity user_link_capacity(const std::vector<UserCapacityInputs>& inputs);

// Build the closed-form inputs for the selected users of a beamformer set.
// Threshold mapping: {gamma_k >= L} = {|rho|^2 >= r*} with
// r* = L / (signal - L * phi_y); users with a non-positive denominator are
// marked infeasible and contribute zero.
std::vector<UserCapacityInputs> capacity_user_inputs(const BfProblem& prob,
                                                     const BeamformerSet& bf,
                                                     const ShadowedRicianParams& fading,
                                                     double sinr_threshold);

struct CapacityResult {
    double c1 = 0;
    double c2 = 0;
    std::vector<double> c2_per_user;
    double c = 0; // min(c1, c2)
    enum class Method { closed_form, monte_carlo } method = Method::closed_form;
    std::map<std::string, double> diagnostics;
};

CapacityResult end_to_end_capacity(double c1, double c2);

// Monte Carlo oracle for the user-link sum rate with the same structured
// draws (one scalar fade per user per realization) and threshold indicator.
McEstimate user_link_capacity_mc(const RngStream& rng, const BfProblem& prob,
                                 const BeamformerSet& bf,
                                 const ShadowedRicianParams& fading,
                                 double sinr_threshold, long n);

// Same estimator on caller-provided squared-fade draws (n x K, row-major
// per realization); lets sweeps reuse one draw set across schemes.
McEstimate user_link_sum_rate_on_draws(const std::vector<double>& power_draws, int n_users,
                                       const BfProblem& prob, const BeamformerSet& bf,
                                       double sinr_threshold);

} // namespace htsim
