#include "htsim/beamforming.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace htsim {

namespace {

constexpr double kMuFloor = 1e-12;

double abs2(const std::complex<double>& z) { return std::norm(z); }

// D_j = P_j |a_j^H w_j|^2 and I_j = sigma^2 + sum_{l!=j} P_l |a_j^H w_l|^2
struct LinkTerms {
    Eigen::VectorXd D;
    Eigen::VectorXd I;
};

LinkTerms link_terms(const BfProblem& prob, const Eigen::MatrixXcd& w) {
    const int K = prob.n_users();
    LinkTerms t;
    t.D.resize(K);
    t.I.resize(K);
    for (int j = 0; j < K; ++j) {
        const Eigen::VectorXcd& aj = prob.steering.col(j);
        double interf = 0.0;
        for (int l = 0; l < K; ++l) {
            const double p = abs2(aj.dot(w.col(l)));
            if (l == j)
                t.D(j) = prob.power(j) * p;
            else
                interf += prob.power(l) * p;
        }
        t.I(j) = prob.noise + interf;
    }
    return t;
}

} // namespace

void BfProblem::validate() const {
    if (steering.rows() < 1 || steering.cols() < 1)
        throw std::invalid_argument("BfProblem: empty steering matrix");
    for (int k = 0; k < n_users(); ++k)
        if (steering.col(k).norm() == 0.0)
            throw std::invalid_argument("BfProblem: zero steering column");
    if (power.size() != n_users())
        throw std::invalid_argument("BfProblem: need one power per user");
    if ((power.array() <= 0.0).any())
        throw std::invalid_argument("BfProblem: powers must be > 0");
    if (!(noise > 0.0)) throw std::invalid_argument("BfProblem: noise must be > 0");
}

void AlgorithmConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("AlgorithmConfig: epsilon must be > 0");
    if (sinr_threshold < 0.0)
        throw std::invalid_argument("AlgorithmConfig: threshold must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("AlgorithmConfig: max_iters must be >= 1");
}

Eigen::VectorXcd virtual_sinr_weights(const BfProblem& prob, const Eigen::MatrixXd& mu,
                                      int k) {
    const int N = prob.n_beams(), K = prob.n_users();
    if (k < 0 || k >= K) throw std::invalid_argument("virtual_sinr_weights: bad user index");
    Eigen::MatrixXcd B = prob.noise * Eigen::MatrixXcd::Identity(N, N);
    for (int j = 0; j < K; ++j) {
        if (j == k) continue;
        if (!(mu(k, j) > 0.0))
            throw std::invalid_argument("virtual_sinr_weights: weights must be > 0");
        const Eigen::VectorXcd& aj = prob.steering.col(j);
        B.noalias() += prob.interference_power(k, j) * mu(k, j) * (aj * aj.adjoint());
    }
    Eigen::LLT<Eigen::MatrixXcd> llt(B);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("virtual_sinr_weights: Hermitian solve failed");
    Eigen::VectorXcd w = llt.solve(prob.steering.col(k));
    return w / w.norm();
}

WeightUpdate update_weights(const BfProblem& prob, const Eigen::MatrixXcd& weights, int k) {
    const int K = prob.n_users();
    if (K < 2) throw std::invalid_argument("update_weights: needs at least two users");
    if (k < 0 || k >= K) throw std::invalid_argument("update_weights: bad user index");
    const LinkTerms t = link_terms(prob, weights);
    for (int j = 0; j < K; ++j)
        if (!(t.D(j) > 0.0))
            throw std::invalid_argument("update_weights: a user has zero signal power");

    // Q = diag(d_j) - 1 v^T over j != k, from the gradient fixed point:
    //   mu_kj D_k / (sigma^2 + sum_l P mu_kl |a_l^H w_k|^2)
    //     = D_j (I_k + D_k) / (I_j (I_j + D_j))
    Eigen::MatrixXd Q(K - 1, K - 1);
    Eigen::VectorXd v(K - 1);
    int col = 0;
    for (int l = 0; l < K; ++l) {
        if (l == k) continue;
        v(col++) = prob.interference_power(k, l) *
                   abs2(prob.steering.col(l).dot(weights.col(k)));
    }
    int row = 0;
    for (int j = 0; j < K; ++j) {
        if (j == k) continue;
        const double dj = t.D(k) * t.I(j) * (t.I(j) + t.D(j)) /
                          (t.D(j) * (t.I(k) + t.D(k)));
        for (int c = 0; c < K - 1; ++c) Q(row, c) = -v(c);
        Q(row, row) += dj;
        ++row;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Q);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(K - 1, prob.noise);
    Eigen::VectorXd mu = lu.solve(rhs);
    const double residual = (Q * mu - rhs).norm();
    if (!mu.allFinite() || residual > 1e-6 * rhs.norm()) {
        std::ostringstream os;
        os << "update_weights: singular weight system for user " << k
           << " (residual " << residual << ")";
        throw std::runtime_error(os.str());
    }
    WeightUpdate out;
    out.mu = mu;
    for (int i = 0; i < mu.size(); ++i) {
        if (!(out.mu(i) > 0.0)) {
            out.mu(i) = kMuFloor;
            out.clamped = true;
        }
    }
    return out;
}

double upper_bound_sum_rate(const BfProblem& prob, const Eigen::MatrixXcd& weights) {
    const LinkTerms t = link_terms(prob, weights);
    double acc = 0.0;
    for (int j = 0; j < prob.n_users(); ++j) acc += std::log1p(t.D(j) / t.I(j));
    return acc;
}

double avg_virtual_sinr(const BfProblem& prob, const Eigen::MatrixXcd& weights,
                        const Eigen::MatrixXd& mu, int k) {
    const Eigen::VectorXcd& wk = weights.col(k);
    const double num = prob.power(k) * abs2(prob.steering.col(k).dot(wk));
    double den = prob.noise;
    for (int j = 0; j < prob.n_users(); ++j) {
        if (j == k) continue;
        den += prob.interference_power(k, j) * mu(k, j) *
               abs2(prob.steering.col(j).dot(wk));
    }
    return num / den;
}

Eigen::VectorXcd gradient_upper_bound(const BfProblem& prob,
                                      const Eigen::MatrixXcd& weights, int k) {
    const LinkTerms t = link_terms(prob, weights);
    const Eigen::VectorXcd& wk = weights.col(k);
    const Eigen::VectorXcd& ak = prob.steering.col(k);
    Eigen::VectorXcd g = (2.0 * prob.power(k) / (t.I(k) + t.D(k))) * ak * (ak.dot(wk));
    for (int j = 0; j < prob.n_users(); ++j) {
        if (j == k) continue;
        const Eigen::VectorXcd& aj = prob.steering.col(j);
        g -= (2.0 * prob.power(k) * t.D(j) / (t.I(j) * (t.I(j) + t.D(j)))) * aj *
             (aj.dot(wk));
    }
    return g;
}

Eigen::VectorXcd gradient_avg_virtual_sinr(const BfProblem& prob,
                                           const Eigen::MatrixXcd& weights,
                                           const Eigen::MatrixXd& mu, int k) {
    const Eigen::VectorXcd& wk = weights.col(k);
    const Eigen::VectorXcd& ak = prob.steering.col(k);
    const double num = prob.power(k) * abs2(ak.dot(wk));
    double den = prob.noise;
    for (int j = 0; j < prob.n_users(); ++j) {
        if (j == k) continue;
        den += prob.interference_power(k, j) * mu(k, j) *
               abs2(prob.steering.col(j).dot(wk));
    }
    Eigen::VectorXcd g = (2.0 * prob.power(k) / den) * ak * (ak.dot(wk));
    for (int j = 0; j < prob.n_users(); ++j) {
        if (j == k) continue;
        const Eigen::VectorXcd& aj = prob.steering.col(j);
        g -= (2.0 * num / (den * den)) * prob.interference_power(k, j) * mu(k, j) * aj *
             (aj.dot(wk));
    }
    return g;
}

double instantaneous_sinr(const std::vector<Eigen::VectorXcd>& h,
                          const Eigen::MatrixXcd& weights, const Eigen::VectorXd& power,
                          double noise, int k) {
    const Eigen::VectorXcd& hk = h.at(k);
    double interf = 0.0;
    for (int j = 0; j < weights.cols(); ++j) {
        if (j == k) continue;
        interf += power(j) * abs2(hk.dot(weights.col(j)));
    }
    const double sig = power(k) * abs2(hk.dot(weights.col(k)));
    return sig / (interf + noise);
}

namespace {

BfProblem restrict_problem(const BfProblem& prob, const std::vector<int>& active) {
    BfProblem sub;
    sub.steering.resize(prob.n_beams(), static_cast<int>(active.size()));
    sub.power.resize(static_cast<int>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i) {
        sub.steering.col(static_cast<int>(i)) = prob.steering.col(active[i]);
        sub.power(static_cast<int>(i)) = prob.power(active[i]);
    }
    sub.noise = prob.noise;
    sub.common_interference_power = prob.common_interference_power;
    return sub;
}

Eigen::MatrixXcd initial_weights(const BfProblem& prob, const AlgorithmConfig& cfg) {
    const int N = prob.n_beams(), K = prob.n_users();
    Eigen::MatrixXcd w(N, K);
    if (cfg.initializer == AlgorithmConfig::Init::matched_filter) {
        for (int k = 0; k < K; ++k)
            w.col(k) = prob.steering.col(k) / prob.steering.col(k).norm();
    } else {
        std::mt19937_64 eng(cfg.init_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int k = 0; k < K; ++k) {
            for (int n = 0; n < N; ++n)
                w(n, k) = std::complex<double>(gauss(eng), gauss(eng));
            w.col(k) /= w.col(k).norm();
        }
    }
    return w;
}

struct InnerResult {
    Eigen::MatrixXcd weights;
    Eigen::MatrixXd mu;
    int iterations = 0;
    bool converged = false;
    bool clamped = false;
    std::vector<std::pair<double, double>> trace;
};

InnerResult inner_iteration(const BfProblem& prob, const AlgorithmConfig& cfg) {
    const int K = prob.n_users();
    InnerResult r;
    r.weights = initial_weights(prob, cfg);
    r.mu = Eigen::MatrixXd::Constant(K, K, cfg.mu_init);
    if (K == 1) {
        // single user: matched filter is already the maximizer
        r.weights.col(0) = prob.steering.col(0) / prob.steering.col(0).norm();
        r.iterations = 1;
        r.converged = true;
        return r;
    }
    for (int it = 0; it < cfg.max_iters; ++it) {
        r.iterations = it + 1;
        if (cfg.update_mu_first || it > 0) {
            for (int k = 0; k < K; ++k) {
                WeightUpdate up = update_weights(prob, r.weights, k);
                r.clamped = r.clamped || up.clamped;
                int col = 0;
                for (int j = 0; j < K; ++j) {
                    if (j == k) continue;
                    r.mu(k, j) = up.mu(col++);
                }
            }
        }
        double pre = 0.0;
        for (int k = 0; k < K; ++k) pre += avg_virtual_sinr(prob, r.weights, r.mu, k);
        Eigen::MatrixXcd next(r.weights.rows(), K);
        for (int k = 0; k < K; ++k) next.col(k) = virtual_sinr_weights(prob, r.mu, k);
        double post = 0.0;
        for (int k = 0; k < K; ++k) post += avg_virtual_sinr(prob, next, r.mu, k);
        r.trace.emplace_back(pre, post);
        double delta = 0.0;
        for (int k = 0; k < K; ++k)
            delta = std::max(delta, (next.col(k) - r.weights.col(k)).norm());
        r.weights = std::move(next);
        if (delta <= cfg.epsilon) {
            r.converged = true;
            break;
        }
    }
    return r;
}

} // namespace

BeamformerSet run_algorithm1(const BfProblem& prob, const AlgorithmConfig& cfg,
                             const FeedbackFn& feedback) {
    prob.validate();
    cfg.validate();
    if (cfg.sinr_threshold > 0.0 && !feedback)
        throw std::invalid_argument(
            "run_algorithm1: a feedback probe is required for a positive threshold");

    const int K = prob.n_users();
    BeamformerSet out;
    out.weights = initial_weights(prob, cfg);
    out.mu = Eigen::MatrixXd::Constant(K, K, cfg.mu_init);

    std::vector<int> active(K);
    for (int k = 0; k < K; ++k) active[k] = k;

    while (!active.empty()) {
        const BfProblem sub = restrict_problem(prob, active);
        InnerResult inner = inner_iteration(sub, cfg);
        for (std::size_t i = 0; i < active.size(); ++i) {
            out.weights.col(active[i]) = inner.weights.col(static_cast<int>(i));
            for (std::size_t j = 0; j < active.size(); ++j)
                out.mu(active[i], active[j]) = inner.mu(static_cast<int>(i),
                                                        static_cast<int>(j));
        }
        out.iterations += inner.iterations;
        out.converged = inner.converged;
        out.mu_clamped = out.mu_clamped || inner.clamped;
        out.surrogate_trace.insert(out.surrogate_trace.end(), inner.trace.begin(),
                                   inner.trace.end());

        if (cfg.sinr_threshold <= 0.0) {
            out.selected = active;
            break;
        }
        std::vector<int> kept;
        for (int k : active)
            if (feedback(k, out.weights, active) >= cfg.sinr_threshold) kept.push_back(k);
        if (kept.size() == active.size()) {
            out.selected = active;
            break;
        }
        active = std::move(kept);
        if (active.empty()) out.selected.clear();
    }
    return out;
}

BeamformerSet baseline_bf(const BfProblem& prob, BaselineKind kind) {
    prob.validate();
    const int N = prob.n_beams(), K = prob.n_users();
    BeamformerSet out;
    out.mu = Eigen::MatrixXd::Ones(K, K);
    out.weights.resize(N, K);
    out.selected.resize(K);
    for (int k = 0; k < K; ++k) out.selected[k] = k;
    out.converged = true;
    out.iterations = 1;

    if (kind == BaselineKind::slnr) {
        for (int k = 0; k < K; ++k)
            out.weights.col(k) = virtual_sinr_weights(prob, out.mu, k);
        return out;
    }
    if (N < K) throw std::invalid_argument("baseline_bf: ZF needs N >= K");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(prob.steering);
    if (qr.rank() < K)
        throw std::invalid_argument("baseline_bf: steering matrix is rank deficient");
    const Eigen::MatrixXcd gram = prob.steering.adjoint() * prob.steering;
    const Eigen::MatrixXcd pinv = prob.steering * gram.llt().solve(
                                      Eigen::MatrixXcd::Identity(K, K));
    for (int k = 0; k < K; ++k) out.weights.col(k) = pinv.col(k) / pinv.col(k).norm();
    return out;
}

} // namespace htsim
