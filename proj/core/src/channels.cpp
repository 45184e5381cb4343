#include "htsim/channels.hpp"

#include "htsim/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace htsim {

// ---------------------------------------------------------------------------
// Malaga
// ---------------------------------------------------------------------------

double MalagaParams::omega_prime() const {
    return Omega0 + 2.0 * b0 * rho0 +
           2.0 * std::sqrt(2.0 * b0 * Omega0 * rho0) * std::cos(phiA - phiB);
}

void MalagaParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("MalagaParams: alpha must be > 0");
    if (beta < 1) throw std::invalid_argument("MalagaParams: beta must be >= 1");
    if (!(b0 > 0.0)) throw std::invalid_argument("MalagaParams: b0 must be > 0");
    if (rho0 < 0.0 || rho0 > 1.0)
        throw std::invalid_argument("MalagaParams: rho0 must lie in [0,1]");
    if (Omega0 < 0.0) throw std::invalid_argument("MalagaParams: Omega0 must be >= 0");
    if (!(omega_prime() >= 0.0))
        throw std::invalid_argument("MalagaParams: derived omega_prime is negative");
    if (g0() <= 0.0)
        throw std::invalid_argument(
            "MalagaParams: g0 = 0 (rho0 = 1) is a degenerate pure-LoS limit");
}

namespace {

// exact in double for all sane beta (values < 2^53)
double binomial_exact(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return std::round(v);
}

double factorial_exact(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

} // namespace

MalagaConstants malaga_constants(const MalagaParams& p) {
    p.validate();
    const double g0 = p.g0();
    const double op = p.omega_prime();
    const double alpha = p.alpha;
    const int beta = p.beta;
    const double gb = g0 * beta + op;

    MalagaConstants k;
    k.A = 2.0 * std::pow(alpha, 0.5 * alpha) /
          (std::pow(g0, 1.0 + 0.5 * alpha) * std::tgamma(alpha)) *
          std::pow(g0 * beta / gb, 0.5 * alpha + beta);
    k.arg_scale = alpha * beta / gb;
    k.c.resize(beta);
    for (int j = 1; j <= beta; ++j) {
        k.c[j - 1] = binomial_exact(beta - 1, j - 1) *
                     std::pow(gb, 1.0 - 0.5 * j) / factorial_exact(j - 1) *
                     std::pow(op / g0, j - 1.0) * std::pow(alpha / beta, 0.5 * j) *
                     std::pow(alpha * beta / gb, -0.5 * (alpha + j));
    }
    return k;
}

double malaga_pdf(double x, const MalagaParams& p, const MalagaConstants& k) {
    if (!(x > 0.0)) throw std::invalid_argument("malaga_pdf: requires x > 0");
    const double y = k.arg_scale * x;
    double sum = 0.0;
    for (int j = 1; j <= p.beta; ++j)
        sum += k.c[j - 1] * meijer_g_2002(y, {p.alpha, static_cast<double>(j)});
    return 0.5 * k.A * sum / x;
}

double malaga_pdf(double x, const MalagaParams& p) {
    return malaga_pdf(x, p, malaga_constants(p));
}

double malaga_draw(std::mt19937_64& eng, const MalagaParams& p) {
    // Gamma(alpha) screen with unit mean times a squared shadowed-Rician
    // small-scale term (m = beta, 2b = g0, Omega = omega_prime)
    std::gamma_distribution<double> large(p.alpha, 1.0 / p.alpha);
    const ShadowedRicianParams small{p.beta, 0.5 * p.g0(), p.omega_prime()};
    const double x = large(eng);
    const double rho = std::abs(sr_draw_complex(eng, small));
    return x * rho * rho;
}

std::vector<double> malaga_sample(const RngStream& rng, const MalagaParams& p, int n) {
    if (n < 1) throw std::invalid_argument("malaga_sample: n must be >= 1");
    p.validate();
    auto eng = rng.make_engine();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = malaga_draw(eng, p);
    return out;
}

double malaga_mean(const MalagaParams& p) { return p.g0() + p.omega_prime(); }

double malaga_second_moment(const MalagaParams& p) {
    const double g0 = p.g0(), op = p.omega_prime();
    // E[X^2] (1 + 1/alpha) times the squared shadowed-Rician power moment
    const double y2 = op * op * (1.0 + 1.0 / p.beta) + 2.0 * g0 * g0 + 4.0 * g0 * op;
    return (1.0 + 1.0 / p.alpha) * y2;
}

// ---------------------------------------------------------------------------
// Shadowed-Rician
// ---------------------------------------------------------------------------

double ShadowedRicianParams::a1() const {
    return std::pow(2.0 * b * m / (2.0 * b * m + Omega), m) / (2.0 * b);
}
double ShadowedRicianParams::a2() const {
    return Omega / (2.0 * b * (2.0 * b * m + Omega));
}
double ShadowedRicianParams::a3() const {
    return 1.0 / (2.0 * b) - a2();
}

void ShadowedRicianParams::validate() const {
    if (m < 1) throw std::invalid_argument("ShadowedRicianParams: m must be >= 1");
    if (!(b > 0.0)) throw std::invalid_argument("ShadowedRicianParams: b must be > 0");
    if (Omega < 0.0) throw std::invalid_argument("ShadowedRicianParams: Omega must be >= 0");
    if (!(a3() > 0.0)) throw std::invalid_argument("ShadowedRicianParams: a3 must be > 0");
}

double sr_pdf(double x, const ShadowedRicianParams& p) {
    if (!(x > 0.0)) throw std::invalid_argument("sr_pdf: requires x > 0");
    p.validate();
    // Kummer-transformed form: the hypergeometric factor terminates and the
    // exponent decays at the a3 rate, so no overflow for large x.
    const double x2 = x * x;
    const double expo = -p.a3() * x2;
    const double poly = hyp1f1(1.0 - p.m, 1.0, -p.a2() * x2);
    if (expo < -600.0) {
        const double lg = std::log(2.0 * p.a1() * x) + expo + std::log(poly);
        return lg < -745.0 ? 0.0 : std::exp(lg);
    }
    return 2.0 * p.a1() * x * std::exp(expo) * poly;
}

double sr_power_pdf(double r, const ShadowedRicianParams& p) {
    if (!(r > 0.0)) throw std::invalid_argument("sr_power_pdf: requires r > 0");
    const double x = std::sqrt(r);
    return sr_pdf(x, p) / (2.0 * x);
}

std::complex<double> sr_draw_complex(std::mt19937_64& eng, const ShadowedRicianParams& p) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    double los = 0.0;
    if (p.Omega > 0.0) {
        std::gamma_distribution<double> nak(p.m, p.Omega / p.m);
        los = std::sqrt(nak(eng)); // Nakagami(m, Omega) amplitude
    }
    const double theta = uni(eng);
    const double sb = std::sqrt(p.b);
    return std::complex<double>(los * std::cos(theta) + sb * gauss(eng),
                                los * std::sin(theta) + sb * gauss(eng));
}

std::vector<double> sr_sample(const RngStream& rng, const ShadowedRicianParams& p, int n) {
    if (n < 1) throw std::invalid_argument("sr_sample: n must be >= 1");
    p.validate();
    auto eng = rng.make_engine();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = std::abs(sr_draw_complex(eng, p));
    return out;
}

double scaled_sr_cdf(double x, const ShadowedRicianParams& p, double phi) {
    if (x < 0.0) throw std::invalid_argument("scaled_sr_cdf: requires x >= 0");
    if (!(phi > 0.0)) throw std::invalid_argument("scaled_sr_cdf: requires phi > 0");
    p.validate();
    const double a1 = p.a1(), a2 = p.a2(), a3 = p.a3();
    const double z = a3 * x / phi;
    if (z > 745.0) return 1.0;
    const double ez = std::exp(-z);
    double coef = 1.0; // (1-m)_p (-a2)^p / p!
    double total = 0.0;
    for (int q = 0; q < p.m; ++q) {
        if (q > 0) coef *= (q - p.m) * (-a2) / q;
        double inner = 1.0, term = 1.0; // sum_n z^n / n!
        for (int n = 1; n <= q; ++n) {
            term *= z / n;
            inner += term;
        }
        total += coef / std::pow(a3, q + 1) * ez * inner;
    }
    return 1.0 - a1 * total;
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

void BeamGeometry::validate() const {
    if (n_beams < 1) throw std::invalid_argument("BeamGeometry: need at least one beam");
    if (n_users < 1) throw std::invalid_argument("BeamGeometry: need at least one user");
    if (phi.rows() != n_users || phi.cols() != n_beams)
        throw std::invalid_argument("BeamGeometry: phi must be K x N");
    if ((phi.array() < 0.0).any())
        throw std::invalid_argument("BeamGeometry: angles must be >= 0");
    if (static_cast<int>(distance.size()) != n_users)
        throw std::invalid_argument("BeamGeometry: need one distance per user");
    for (double d : distance)
        if (!(d > 0.0)) throw std::invalid_argument("BeamGeometry: distances must be > 0");
    if (!(phi_3db > 0.0)) throw std::invalid_argument("BeamGeometry: phi_3db must be > 0");
    if (!(g_max > 0.0) || !(rx_gain > 0.0) || !(carrier_hz > 0.0))
        throw std::invalid_argument("BeamGeometry: gains and carrier must be > 0");
}

double beam_gain(double phi_kn, double phi_3db, double g_max) {
    if (phi_kn < 0.0 || !(phi_3db > 0.0))
        throw std::invalid_argument("beam_gain: bad angles");
    const double u = 2.07123 * std::sin(phi_kn) / std::sin(phi_3db);
    double f;
    if (u < 1e-4) {
        // removable singularity: series of J1(u)/(2u) + 36 J3(u)/u^3
        const double u2 = u * u;
        f = 1.0 + u2 * (-5.0 / 64 + u2 * (19.0 / 7680 - u2 / 23040.0));
    } else {
        f = bessel_j(1, u) / (2.0 * u) + 36.0 * bessel_j(3, u) / (u * u * u);
    }
    // pattern value at u -> 0 is 1/4 + 36/48 = 1; dividing keeps the
    // boresight invariant exact under pattern edits
    constexpr double pattern_at_zero = 0.25 + 36.0 / 48.0;
    const double ratio = f / pattern_at_zero;
    return g_max * ratio * ratio;
}

Eigen::VectorXd steering_vector(const BeamGeometry& geom, int k) {
    geom.validate();
    if (k < 0 || k >= geom.n_users)
        throw std::invalid_argument("steering_vector: user index out of range");
    const double path = kSpeedOfLight / (4.0 * std::numbers::pi * geom.carrier_hz *
                                         geom.distance[k]);
    Eigen::VectorXd a(geom.n_beams);
    for (int n = 0; n < geom.n_beams; ++n)
        a(n) = std::sqrt(geom.rx_gain) * path *
               std::sqrt(beam_gain(geom.phi(k, n), geom.phi_3db, geom.g_max));
    return a;
}

Eigen::VectorXcd build_channel(std::mt19937_64& eng, const BeamGeometry& geom,
                               const ShadowedRicianParams& p, int k) {
    const Eigen::VectorXd amp = steering_vector(geom, k);
    const std::complex<double> rho = sr_draw_complex(eng, p);
    const double phase = -2.0 * std::numbers::pi * geom.carrier_hz *
                         geom.distance[k] / kSpeedOfLight;
    const std::complex<double> rot(std::cos(phase), std::sin(phase));
    return (rho * rot) * amp.cast<std::complex<double>>();
}

Eigen::VectorXcd build_channel(const RngStream& rng, const BeamGeometry& geom,
                               const ShadowedRicianParams& p, int k) {
    auto eng = rng.make_engine();
    return build_channel(eng, geom, p, k);
}

} // namespace htsim
