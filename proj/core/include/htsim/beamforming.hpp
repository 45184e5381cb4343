#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace htsim {

// Static beamforming problem: steering columns a(phi_k), per-user transmit
// powers and the noise floor. The steering profile is real for the default
// geometry but kept complex so a phased variant drops in unchanged.
struct BfProblem {
    Eigen::MatrixXcd steering; // N x K, column k = a(phi_k)
    Eigen::VectorXd power;     // K, per-user transmit power (W)
    double noise = 1.0;        // sigma^2 (W)
    // Weighted-leakage terms of the virtual SINR carry the served user's own
    // power; switch to false to weight by the interfered user's power instead.
    bool common_interference_power = true;

    int n_beams() const { return static_cast<int>(steering.rows()); }
    int n_users() const { return static_cast<int>(steering.cols()); }
    double interference_power(int k, int j) const {
        return common_interference_power ? power(k) : power(j);
    }
    void validate() const;
};

struct AlgorithmConfig {
    double epsilon = 1e-6;      // stop when max_k ||w_k^{t+1} - w_k^t|| <= epsilon
    double sinr_threshold = 0;  // Lambda_th (linear); users below it are dropped
    int max_iters = 200;
    enum class Init { matched_filter, random_seeded };
    Init initializer = Init::matched_filter;
    std::uint64_t init_seed = 1;
    double mu_init = 1.0;
    // Listed order updates the weights before the beamformers each sweep;
    // disabling it makes the first beamformer pass use mu_init directly
    // (with mu_init = 1 that first iterate is the SLNR solution).
    bool update_mu_first = true;

    void validate() const;
};

struct BeamformerSet {
    Eigen::MatrixXcd weights;  // N x K unit-norm columns
    Eigen::MatrixXd mu;        // K x K weight coefficients (diagonal unused)
    std::vector<int> selected; // user indices that passed the SINR feedback
    int iterations = 0;
    bool converged = false;
    bool mu_clamped = false;   // some solved weights hit the positivity floor
    // per inner sweep: surrogate sum before/after the beamformer update,
    // both under the weights solved in that sweep
    std::vector<std::pair<double, double>> surrogate_trace;
};

struct WeightUpdate {
    Eigen::VectorXd mu; // K-1 entries, user k skipped
    bool clamped = false;
};

// Beamformer for user k maximizing the weighted Rayleigh quotient:
// normalized solve of (sigma^2 I + sum_{j!=k} P mu_kj a_j a_j^H) w = a_k.
Eigen::VectorXcd virtual_sinr_weights(const BfProblem& prob, const Eigen::MatrixXd& mu,
                                      int k);

// Weight coefficients solved from the fixed-point condition that makes the
// ergodic-rate gradient and the average-virtual-SINR gradient vanish at the
// same beamformer: mu_k = sigma^2 Q_k^{-1} 1. Non-positive solutions are
// clamped to 1e-12 and flagged.
WeightUpdate update_weights(const BfProblem& prob, const Eigen::MatrixXcd& weights, int k);

// Sum-rate upper bound surrogate sum_j ln(1 + D_j / I_j) (nats).
double upper_bound_sum_rate(const BfProblem& prob, const Eigen::MatrixXcd& weights);

// Average virtual SINR of user k under weight matrix mu.
double avg_virtual_sinr(const BfProblem& prob, const Eigen::MatrixXcd& weights,
                        const Eigen::MatrixXd& mu, int k);

// Gradients (convention 2 d/d conj(w_k)) of the two objectives above.
Eigen::VectorXcd gradient_upper_bound(const BfProblem& prob,
                                      const Eigen::MatrixXcd& weights, int k);
Eigen::VectorXcd gradient_avg_virtual_sinr(const BfProblem& prob,
                                           const Eigen::MatrixXcd& weights,
                                           const Eigen::MatrixXd& mu, int k);

// Instantaneous SINR of user k for channel realizations h (one N-vector per
// user).
double instantaneous_sinr(const std::vector<Eigen::VectorXcd>& h,
                          const Eigen::MatrixXcd& weights, const Eigen::VectorXd& power,
                          double noise, int k);

// One-bit feedback probe: reports the measured SINR of `user` under the
// current weights restricted to the active set.
using FeedbackFn = std::function<double(int user, const Eigen::MatrixXcd& weights,
                                        const std::vector<int>& active)>;

// Alternating weight/beamformer iteration with one-bit-feedback user
// selection. `feedback` may be empty when the threshold is zero.
BeamformerSet run_algorithm1(const BfProblem& prob, const AlgorithmConfig& cfg,
                             const FeedbackFn& feedback = {});

enum class BaselineKind { zero_forcing, slnr };

// ZF (normalized pseudo-inverse columns) and SLNR (virtual SINR with all
// weights fixed to one) reference designs.
BeamformerSet baseline_bf(const BfProblem& prob, BaselineKind kind);

} // namespace htsim
