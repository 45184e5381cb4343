#include "htsim/validate.hpp"

#include "htsim/capacity.hpp"
#include "htsim/quad.hpp"
#include "htsim/specfun.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>

namespace htsim {

namespace {

struct Suite {
    std::vector<CheckResult> results;

    void run(const std::string& name, const std::string& context, double tol,
             const std::function<double()>& observe, const std::string& note = "") {
        CheckResult r;
        r.name = name;
        r.context = context;
        r.tolerance = tol;
        r.note = note;
        try {
            r.observed = observe();
            r.pass = r.observed <= tol;
        } catch (const std::exception& e) {
            r.pass = false;
            r.observed = std::numeric_limits<double>::quiet_NaN();
            r.note = e.what();
        }
        results.push_back(r);
    }
};

// ---- sampler goodness of fit -------------------------------------------

// Equal-probability binning against the analytic CDF; returns the chi-square
// p-value complement (1 - p), so "observed <= tol" with tol = 0.99 means
// p > 0.01.
double gof_complement(std::vector<double> samples,
                      const std::function<double(double)>& cdf, int bins) {
    std::sort(samples.begin(), samples.end());
    const long n = static_cast<long>(samples.size());
    // bin edges from empirical-range bisection of the analytic CDF
    std::vector<double> edges(bins + 1);
    edges[0] = 0.0;
    edges[bins] = std::numeric_limits<double>::infinity();
    double lo_bound = 0.0, hi_bound = samples.back() * 4.0 + 1.0;
    for (int i = 1; i < bins; ++i) {
        const double target = static_cast<double>(i) / bins;
        double lo = lo_bound, hi = hi_bound;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid) < target ? lo : hi) = mid;
        }
        edges[i] = 0.5 * (lo + hi);
        lo_bound = edges[i];
    }
    std::vector<long> count(bins, 0);
    std::size_t idx = 0;
    for (int b = 0; b < bins; ++b) {
        while (idx < samples.size() && samples[idx] <= edges[b + 1]) {
            ++count[b];
            ++idx;
        }
    }
    const double expected = static_cast<double>(n) / bins;
    double stat = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double d = count[b] - expected;
        stat += d * d / expected;
    }
    const double p = chi_square_sf(stat, bins - 1);
    return 1.0 - p;
}

double malaga_cdf_quad(double x, const MalagaParams& p, const MalagaConstants& k) {
    if (x <= 0.0) return 0.0;
    return integrate([&](double t) { return malaga_pdf(t, p, k); }, 1e-300, x, 1e-9)
        .value;
}

// ---- random beamforming instances ----------------------------------------

BfProblem random_problem(std::mt19937_64& eng, int n_beams, int n_users,
                         double snr_scale) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.2, 1.0);
    BfProblem prob;
    prob.steering.resize(n_beams, n_users);
    for (int k = 0; k < n_users; ++k) {
        for (int n = 0; n < n_beams; ++n)
            prob.steering(n, k) = std::complex<double>(std::abs(gauss(eng)) + 0.05, 0.0);
        prob.steering.col(k) *= uni(eng) / prob.steering.col(k).norm();
    }
    prob.power = Eigen::VectorXd::Constant(n_users, snr_scale);
    prob.noise = 1.0;
    return prob;
}

// fixed-point residual of the solved weights in the gradient- alignment
// equation, relative form, worst entry
double eq18_residual(const BfProblem& prob, const Eigen::MatrixXcd& w,
                     const Eigen::MatrixXd& mu, int k) {
    const int K = prob.n_users();
    Eigen::VectorXd D(K), I(K);
    for (int j = 0; j < K; ++j) {
        double interf = 0.0;
        for (int l = 0; l < K; ++l) {
            const double pr = std::norm(prob.steering.col(j).dot(w.col(l)));
            if (l == j)
                D(j) = prob.power(j) * pr;
            else
                interf += prob.power(l) * pr;
        }
        I(j) = prob.noise + interf;
    }
    double den = prob.noise;
    for (int l = 0; l < K; ++l) {
        if (l == k) continue;
        den += prob.interference_power(k, l) * mu(k, l) *
               std::norm(prob.steering.col(l).dot(w.col(k)));
    }
    double worst = 0.0;
    for (int j = 0; j < K; ++j) {
        if (j == k) continue;
        const double lhs = D(j) * (I(k) + D(k)) / (I(j) * (I(j) + D(j)));
        const double rhs = mu(k, j) * D(k) / den;
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
    }
    return worst;
}

Eigen::VectorXcd fd_gradient(const std::function<double(const Eigen::MatrixXcd&)>& f,
                             Eigen::MatrixXcd w, int k, double h) {
    Eigen::VectorXcd g(w.rows());
    for (int i = 0; i < w.rows(); ++i) {
        const std::complex<double> orig = w(i, k);
        w(i, k) = orig + h;
        const double fpx = f(w);
        w(i, k) = orig - h;
        const double fmx = f(w);
        w(i, k) = orig + std::complex<double>(0, h);
        const double fpy = f(w);
        w(i, k) = orig - std::complex<double>(0, h);
        const double fmy = f(w);
        w(i, k) = orig;
        g(i) = std::complex<double>((fpx - fmx) / (2 * h), (fpy - fmy) / (2 * h));
    }
    return g;
}

double sin_angle(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    const std::complex<double> c = u.dot(v) / (u.squaredNorm());
    return (v - c * u).norm() / v.norm();
}

} // namespace

std::vector<CheckResult> validate_models(const ScenarioConfig& cfg) {
    Suite suite;
    const double gbar = 100.0;

    // --- channel densities and samplers ---
    for (const auto& [name, mp] : turbulence_presets()) {
        const MalagaConstants mk = malaga_constants(mp);
        suite.run("malaga_pdf_normalization", name, 1e-6, [&] {
            const double v =
                integrate_semi_infinite([&](double x) { return malaga_pdf(x, mp, mk); },
                                        1e-300, 1e-10)
                    .value;
            return std::abs(v - 1.0);
        });
        suite.run("malaga_mean_consistency", name, 3.0, [&] {
            const double qm = integrate_semi_infinite(
                                  [&](double x) { return x * malaga_pdf(x, mp, mk); },
                                  1e-300, 1e-10)
                                  .value;
            const auto draws = malaga_sample({cfg.sweep.seed, 11}, mp, 1000000);
            long double s = 0, s2 = 0;
            for (double d : draws) {
                s += d;
                s2 += static_cast<long double>(d) * d;
            }
            const double mean = static_cast<double>(s / draws.size());
            const double se = std::sqrt((static_cast<double>(s2 / draws.size()) -
                                         mean * mean) /
                                        draws.size());
            return std::abs(mean - qm) / se;
        });
        suite.run("malaga_sampler_gof", name, 0.99, [&] {
            auto draws = malaga_sample({cfg.sweep.seed, 12}, mp, 100000);
            return gof_complement(std::move(draws),
                                  [&](double x) { return malaga_cdf_quad(x, mp, mk); },
                                  50);
        });
    }

    for (const auto& [name, sp] : shadowing_presets()) {
        suite.run("sr_pdf_normalization", name, 1e-6, [&] {
            const double v = integrate_semi_infinite(
                                 [&](double x) { return sr_pdf(x, sp); }, 1e-300, 1e-10)
                                 .value;
            return std::abs(v - 1.0);
        });
        suite.run("sr_second_moment", name, 3.0, [&] {
            const double qm =
                integrate_semi_infinite([&](double x) { return x * x * sr_pdf(x, sp); },
                                        1e-300, 1e-10)
                    .value;
            const auto draws = sr_sample({cfg.sweep.seed, 13}, sp, 1000000);
            long double s = 0, s2 = 0;
            for (double d : draws) {
                const double r = d * d;
                s += r;
                s2 += static_cast<long double>(r) * r;
            }
            const double mean = static_cast<double>(s / draws.size());
            const double se = std::sqrt((static_cast<double>(s2 / draws.size()) -
                                         mean * mean) /
                                        draws.size());
            return std::abs(mean - qm) / se;
        });
        suite.run("sr_sampler_gof", name, 0.99, [&] {
            auto draws = sr_sample({cfg.sweep.seed, 14}, sp, 100000);
            return gof_complement(std::move(draws),
                                  [&](double x) {
                                      return x <= 0.0 ? 0.0
                                                      : scaled_sr_cdf(x * x, sp, 1.0);
                                  },
                                  50);
        });
    }

    suite.run("sr_cdf_constants_identity", "m=1..10", 1e-12, [&] {
        double worst = 0.0;
        for (int m = 1; m <= 10; ++m) {
            const ShadowedRicianParams p{m, 0.126, 0.835};
            worst = std::max(worst, std::abs(scaled_sr_cdf(0.0, p, 1.0)));
        }
        return worst;
    });

    // --- feeder closed forms ---
    for (const auto& [name, mp] : turbulence_presets()) {
        const MalagaConstants mk = malaga_constants(mp);
        suite.run("mgf_vs_quadrature", name, 1e-6, [&] {
            double worst = 0.0;
            for (double s : {0.01, 1.0, 100.0}) {
                const double cf = mgf_gamma1(s, gbar, mp);
                const double q =
                    integrate_semi_infinite(
                        [&](double y) {
                            return std::exp(-s * gbar * y * y) * malaga_pdf(y, mp, mk);
                        },
                        1e-300, 1e-10)
                        .value;
                worst = std::max(worst, std::abs(cf - q) / std::abs(q));
            }
            return worst;
        });
        suite.run("mgf_vs_mc", name, 0.01, [&] {
            const auto draws = malaga_sample({cfg.sweep.seed, 15}, mp, 1000000);
            double worst = 0.0;
            for (double s : {0.01, 0.1, 1.0}) {
                long double acc = 0;
                for (double d : draws) acc += std::exp(-s * gbar * d * d);
                const double mc = static_cast<double>(acc / draws.size());
                const double cf = mgf_gamma1(s, gbar, mp);
                worst = std::max(worst, std::abs(cf - mc) / mc);
            }
            return worst;
        });
        suite.run("mgf_deriv_vs_fd", name, 1e-4, [&] {
            double worst = 0.0;
            for (double s : {0.05, 0.7, 20.0}) {
                const double h = 1e-5 * s;
                const double fd =
                    (mgf_gamma1(s + h, gbar, mp) - mgf_gamma1(s - h, gbar, mp)) / (2 * h);
                const double cf = mgf_gamma1_deriv(s, gbar, mp);
                worst = std::max(worst, std::abs(cf - fd) / std::abs(fd));
            }
            return worst;
        });
        suite.run("c1_vs_mc", name, 0.01, [&] {
            double worst = 0.0;
            int stream = 16;
            for (double db : {10.0, 20.0, 30.0}) {
                FeederConfig fc;
                fc.tx_power = std::pow(10.0, db / 10.0);
                fc.oe_coeff = 1.0;
                fc.noise_power = 1.0;
                fc.gateways = {{FsoPathLoss{}, mp}, {FsoPathLoss{}, mp}};
                const double cf = feeder_capacity(fc, {30}).value;
                const McEstimate mc =
                    feeder_capacity_mc({cfg.sweep.seed, static_cast<std::uint64_t>(100 + stream++)}, fc, 1000000);
                worst = std::max(worst, std::abs(cf - mc.mean) / mc.mean);
            }
            return worst;
        });
    }

    // --- user-link capacity closed form ---
    {
        const BfProblem prob = cfg.userlink.problem();
        const BeamformerSet bf = baseline_bf(prob, BaselineKind::slnr);
        int stream = 30;
        for (const auto& [name, sp] : shadowing_presets()) {
            suite.run("c2_vs_mc", name, 0.02, [&, spc = sp, st = stream] {
                const auto inputs =
                    capacity_user_inputs(prob, bf, spc, cfg.userlink.sinr_threshold);
                const double cf = user_link_capacity(inputs).total;
                const McEstimate mc =
                    user_link_capacity_mc({cfg.sweep.seed, static_cast<std::uint64_t>(200 + st)}, prob, bf, spc,
                                          cfg.userlink.sinr_threshold, 1000000);
                return std::abs(cf - mc.mean) / mc.mean;
            });
            ++stream;
        }
    }

    // --- beamforming identities ---
    std::mt19937_64 eng(cfg.sweep.seed ^ 0xabcdef);
    suite.run("weight_update_fixed_point", "20 random instances", 1e-8, [&] {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            BfProblem prob = random_problem(eng, 7, 4, 50.0);
            BeamformerSet bf = run_algorithm1(prob, AlgorithmConfig{});
            for (int k = 0; k < prob.n_users(); ++k) {
                const WeightUpdate up = update_weights(prob, bf.weights, k);
                Eigen::MatrixXd mu = bf.mu;
                int col = 0;
                for (int j = 0; j < prob.n_users(); ++j) {
                    if (j == k) continue;
                    mu(k, j) = up.mu(col++);
                }
                worst = std::max(worst, eq18_residual(prob, bf.weights, mu, k));
            }
        }
        return worst;
    });

    suite.run("gradient_upper_bound_vs_fd", "10 random instances", 1e-5, [&] {
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            BfProblem prob = random_problem(eng, 5, 3, 20.0);
            BeamformerSet bf = baseline_bf(prob, BaselineKind::slnr);
            for (int k = 0; k < prob.n_users(); ++k) {
                const Eigen::VectorXcd g = gradient_upper_bound(prob, bf.weights, k);
                const Eigen::VectorXcd fd = fd_gradient(
                    [&](const Eigen::MatrixXcd& w) { return upper_bound_sum_rate(prob, w); },
                    bf.weights, k, 1e-6);
                worst = std::max(worst, (g - fd).norm() / fd.norm());
            }
        }
        return worst;
    });

    suite.run("gradient_virtual_sinr_vs_fd", "10 random instances", 1e-5, [&] {
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            BfProblem prob = random_problem(eng, 5, 3, 20.0);
            const Eigen::MatrixXd mu = Eigen::MatrixXd::Constant(3, 3, 0.7);
            BeamformerSet bf = baseline_bf(prob, BaselineKind::slnr);
            for (int k = 0; k < prob.n_users(); ++k) {
                const Eigen::VectorXcd g =
                    gradient_avg_virtual_sinr(prob, bf.weights, mu, k);
                const Eigen::VectorXcd fd = fd_gradient(
                    [&](const Eigen::MatrixXcd& w) { return avg_virtual_sinr(prob, w, mu, k); },
                    bf.weights, k, 1e-6);
                worst = std::max(worst, (g - fd).norm() / fd.norm());
            }
        }
        return worst;
    });

    suite.run("gradient_alignment_at_convergence", "20 random instances", 1e-6, [&] {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            BfProblem prob = random_problem(eng, 7, 4, 50.0);
            AlgorithmConfig ac;
            ac.epsilon = 1e-10;
            BeamformerSet bf = run_algorithm1(prob, ac);
            Eigen::MatrixXd mu = bf.mu;
            for (int k = 0; k < prob.n_users(); ++k) {
                const WeightUpdate up = update_weights(prob, bf.weights, k);
                int col = 0;
                for (int j = 0; j < prob.n_users(); ++j) {
                    if (j == k) continue;
                    mu(k, j) = up.mu(col++);
                }
                const Eigen::VectorXcd g16 = gradient_upper_bound(prob, bf.weights, k);
                const Eigen::VectorXcd g17 =
                    gradient_avg_virtual_sinr(prob, bf.weights, mu, k);
                worst = std::max(worst, sin_angle(g16, g17));
            }
        }
        return worst;
    });

    suite.run("beam_center_gain", "", 1e-9, [&] {
        const double g = beam_gain(0.0, cfg.userlink.geometry.phi_3db,
                                   cfg.userlink.geometry.g_max);
        return std::abs(g - cfg.userlink.geometry.g_max) / cfg.userlink.geometry.g_max;
    });
    suite.run("beam_3db_point", "", 5e-3, [&] {
        const double g =
            beam_gain(cfg.userlink.geometry.phi_3db, cfg.userlink.geometry.phi_3db,
                      1.0);
        return std::abs(g - 0.5);
    });

    suite.run("end_to_end_min", "", 0.0, [&] {
        double worst = 0.0;
        worst = std::max(worst, std::abs(end_to_end_capacity(3.0, 5.0).c - 3.0));
        worst = std::max(worst, std::abs(end_to_end_capacity(5.0, 3.0).c - 3.0));
        worst = std::max(worst, std::abs(end_to_end_capacity(4.0, 4.0).c - 4.0));
        return worst;
    });

    return suite.results;
}

bool write_report(const std::vector<CheckResult>& results, std::ostream& out) {
    bool all = true;
    for (const auto& r : results) {
        out << "check=" << r.name;
        if (!r.context.empty()) out << " context=" << r.context;
        out << " tol=" << r.tolerance << " observed=" << r.observed
            << " status=" << (r.pass ? "pass" : "fail");
        if (!r.note.empty()) out << " note=\"" << r.note << "\"";
        out << '\n';
        all = all && r.pass;
    }
    out << "summary=" << (all ? "pass" : "fail") << " checks=" << results.size() << '\n';
    return all;
}

} // namespace htsim
