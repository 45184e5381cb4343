#include "htsim/capacity.hpp"

#include "htsim/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace htsim {

double truncated_log_moment(const ShadowedRicianParams& p, double phi, double lambda) {
    p.validate();
    if (phi < 0.0) throw std::invalid_argument("truncated_log_moment: phi must be >= 0");
    if (lambda < 0.0)
        throw std::invalid_argument("truncated_log_moment: lambda must be >= 0");
    if (phi == 0.0) return 0.0; // degenerate scale, all mass at the origin

    const double a1 = p.a1(), a2 = p.a2(), a3 = p.a3();
    const double nu = a3 / phi;
    const double z = nu * lambda;

    // tail-mass term [1 - F(lambda)] ln(1 + lambda)
    const double tail = 1.0 - scaled_sr_cdf(lambda, p, phi);
    double total = tail * std::log1p(lambda);
    if (z > 700.0) return total; // remaining integral underflows

    const double w = nu * (1.0 + lambda);
    const std::vector<double> psi = psi_integrals(p.m - 1, w);

    // sum_p coeff_p / a3^{p+1} sum_n 1/n! sum_q C(n,q) z^{n-q} psi_q; the
    // nu^n lambda^{n-q} nu^{-q} factors collapse to powers of z = nu*lambda
    const double ez = std::exp(-z);
    double coef = 1.0; // (1-m)_p (-a2)^p / p!  (positive throughout)
    double outer = 0.0;
    for (int pp = 0; pp < p.m; ++pp) {
        if (pp > 0) coef *= (pp - p.m) * (-a2) / pp;
        double inv_nfact = 1.0;
        double inner = 0.0;
        for (int n = 0; n <= pp; ++n) {
            if (n > 0) inv_nfact /= n;
            double binom = 1.0, zpow = 1.0; // C(n,q), z^{n-q} walked down from q = n
            double qsum = 0.0;
            for (int q = n; q >= 0; --q) {
                qsum += binom * zpow * psi[q];
                if (q > 0) {
                    binom *= static_cast<double>(q) / (n - q + 1);
                    zpow *= z;
                }
            }
            inner += inv_nfact * qsum;
        }
        outer += coef / std::pow(a3, pp + 1) * inner;
    }
    total += a1 * ez * outer;
    return total;
}

UserLinkCapacity user_link_capacity(const std::vector<UserCapacityInputs>& inputs) {
    UserLinkCapacity out;
    out.per_user.reserve(inputs.size());
    for (const auto& in : inputs) {
        if (!in.feasible) {
            out.per_user.push_back(0.0);
            continue;
        }
        if (!(in.phi_x > in.phi_y) || in.phi_y < 0.0)
            throw std::invalid_argument("user_link_capacity: requires phi_x > phi_y >= 0");
        const double nats = truncated_log_moment(in.fading, in.phi_x, in.lambda_x) -
                            truncated_log_moment(in.fading, in.phi_y, in.lambda_y);
        const double bits = nats / std::numbers::ln2;
        out.per_user.push_back(bits);
        out.total += bits;
    }
    return out;
}

std::vector<UserCapacityInputs> capacity_user_inputs(const BfProblem& prob,
                                                     const BeamformerSet& bf,
                                                     const ShadowedRicianParams& fading,
                                                     double sinr_threshold) {
    if (sinr_threshold < 0.0)
        throw std::invalid_argument("capacity_user_inputs: threshold must be >= 0");
    std::vector<UserCapacityInputs> out;
    out.reserve(bf.selected.size());
    for (int k : bf.selected) {
        UserCapacityInputs in;
        in.user = k;
        in.fading = fading;
        const Eigen::VectorXcd& ak = prob.steering.col(k);
        double sig = 0.0, interf = 0.0;
        for (int j = 0; j < prob.n_users(); ++j) {
            const double g = prob.power(j) * std::norm(ak.dot(bf.weights.col(j))) /
                             prob.noise;
            if (j == k)
                sig = g;
            else
                interf += g;
        }
        in.phi_y = interf;
        in.phi_x = interf + sig;
        if (sinr_threshold > 0.0) {
            const double denom = sig - sinr_threshold * in.phi_y;
            if (denom <= 0.0) {
                in.feasible = false; // threshold unreachable at any fade level
            } else {
                const double r_star = sinr_threshold / denom;
                in.lambda_x = in.phi_x * r_star;
                in.lambda_y = in.phi_y * r_star;
            }
        }
        out.push_back(in);
    }
    return out;
}

CapacityResult end_to_end_capacity(double c1, double c2) {
    if (c1 < 0.0 || c2 < 0.0)
        throw std::invalid_argument("end_to_end_capacity: capacities must be >= 0");
    CapacityResult r;
    r.c1 = c1;
    r.c2 = c2;
    r.c = std::min(c1, c2);
    return r;
}

McEstimate user_link_sum_rate_on_draws(const std::vector<double>& power_draws, int n_users,
                                       const BfProblem& prob, const BeamformerSet& bf,
                                       double sinr_threshold) {
    if (n_users < 1 || power_draws.size() % n_users != 0)
        throw std::invalid_argument("user_link_sum_rate_on_draws: bad draw matrix");
    const long n = static_cast<long>(power_draws.size()) / n_users;

    // deterministic per-user gains: signal and interference over noise
    std::vector<double> sig(bf.selected.size()), interf(bf.selected.size());
    for (std::size_t i = 0; i < bf.selected.size(); ++i) {
        const int k = bf.selected[i];
        const Eigen::VectorXcd& ak = prob.steering.col(k);
        double s = 0.0, itf = 0.0;
        for (int j = 0; j < prob.n_users(); ++j) {
            const double g = prob.power(j) * std::norm(ak.dot(bf.weights.col(j))) /
                             prob.noise;
            if (j == k)
                s = g;
            else
                itf += g;
        }
        sig[i] = s;
        interf[i] = itf;
    }

    long double sum = 0.0L, sum2 = 0.0L;
    for (long i = 0; i < n; ++i) {
        double rate = 0.0;
        for (std::size_t u = 0; u < bf.selected.size(); ++u) {
            const double r = power_draws[i * n_users + bf.selected[u]];
            const double gamma = r * sig[u] / (r * interf[u] + 1.0);
            if (gamma >= sinr_threshold) rate += std::log2(1.0 + gamma);
        }
        sum += rate;
        sum2 += static_cast<long double>(rate) * rate;
    }
    McEstimate e;
    e.n = n;
    e.mean = static_cast<double>(sum / n);
    const double var = std::max(0.0, static_cast<double>(sum2 / n) - e.mean * e.mean);
    e.std_error = std::sqrt(var / n);
    return e;
}

McEstimate user_link_capacity_mc(const RngStream& rng, const BfProblem& prob,
                                 const BeamformerSet& bf,
                                 const ShadowedRicianParams& fading,
                                 double sinr_threshold, long n) {
    if (n < 10000) throw std::invalid_argument("user_link_capacity_mc: need n >= 1e4");
    fading.validate();
    auto eng = rng.make_engine();
    const int K = prob.n_users();
    std::vector<double> draws(static_cast<std::size_t>(n) * K);
    for (auto& d : draws) d = std::norm(sr_draw_complex(eng, fading));
    return user_link_sum_rate_on_draws(draws, K, prob, bf, sinr_threshold);
}

} // namespace htsim
