#include "htsim/feeder.hpp"

#include "htsim/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace htsim {

void FsoPathLoss::validate() const {
    if (!(tx_gain > 0.0) || !(rx_gain > 0.0))
        throw std::invalid_argument("FsoPathLoss: gains must be > 0");
    if (!(pointing > 0.0 && pointing <= 1.0))
        throw std::invalid_argument("FsoPathLoss: pointing loss must lie in (0,1]");
    if (!(free_space > 0.0 && free_space <= 1.0))
        throw std::invalid_argument("FsoPathLoss: free-space loss must lie in (0,1]");
}

double FeederConfig::avg_snr(int i) const {
    const double g = oe_coeff * gateways.at(i).path.gain();
    return tx_power * g * g / noise_power;
}

void FeederConfig::validate() const {
    if (!(tx_power > 0.0) || !(oe_coeff > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("FeederConfig: powers and oe_coeff must be > 0");
    if (gateways.empty() || gateways.size() > 2)
        throw std::invalid_argument("FeederConfig: need 1 or 2 gateways");
    for (const auto& gw : gateways) {
        gw.path.validate();
        gw.turbulence.validate();
    }
}

void QuadratureSpec::validate() const {
    if (order < 1) throw std::invalid_argument("QuadratureSpec: order must be >= 1");
}

CapacityNodes capacity_quadrature(const QuadratureSpec& q) {
    q.validate();
    const double pi = std::numbers::pi;
    const int T = q.order;
    CapacityNodes out;
    out.s.resize(T);
    out.weight.resize(T);
    for (int t = 1; t <= T; ++t) {
        const double theta = (2.0 * t - 1.0) / (2.0 * T) * pi;
        const double arg = 0.25 * pi * std::cos(theta) + 0.25 * pi;
        const double c = std::cos(arg);
        out.s[t - 1] = std::tan(arg);
        out.weight[t - 1] = pi * pi * std::sin(theta) / (4.0 * T * c * c);
    }
    return out;
}

double stbc_snr(double irradiance1, double irradiance2, const FeederConfig& cfg) {
    if (irradiance1 < 0.0 || irradiance2 < 0.0)
        throw std::invalid_argument("stbc_snr: irradiances must be >= 0");
    const double sum2 = irradiance1 * irradiance1 + irradiance2 * irradiance2;
    return cfg.tx_power * cfg.oe_coeff * cfg.oe_coeff * sum2 / cfg.noise_power;
}

namespace {

// shared assembly of the MGF and its derivative; lower row parameter 0
// selects the MGF, 1 (with the -1/s prefactor) its first derivative
double mgf_assemble(double s, double gamma_bar, const MalagaParams& p, double lower) {
    if (!(s > 0.0)) throw std::invalid_argument("mgf_gamma1: requires s > 0");
    if (!(gamma_bar > 0.0)) throw std::invalid_argument("mgf_gamma1: requires gamma_bar > 0");
    const MalagaConstants k = malaga_constants(p);
    const double x = 16.0 * s * gamma_bar / (k.arg_scale * k.arg_scale);
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int j = 1; j <= p.beta; ++j) {
        MeijerParams1441 mp;
        mp.upper = {0.5 * (2.0 - p.alpha), 0.5 * (1.0 - p.alpha),
                    0.5 * (2.0 - j), 0.5 * (1.0 - j)};
        mp.lower = lower;
        sum += k.c[j - 1] * std::pow(2.0, p.alpha + j) / (2.0 * pi) *
               meijer_g_1441(x, mp);
    }
    return 0.25 * k.A * sum;
}

} // namespace

double mgf_gamma1(double s, double gamma_bar, const MalagaParams& p) {
    return mgf_assemble(s, gamma_bar, p, 0.0);
}

double mgf_gamma1_deriv(double s, double gamma_bar, const MalagaParams& p) {
    return -mgf_assemble(s, gamma_bar, p, 1.0) / s;
}

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

// entire remainder of the capacity kernel: phi(s) - (gamma_E + ln s)
double phi_regular(double s) {
    if (s > 0.5) return phi_node(s) - kEulerGamma - std::log(s);
    double acc = 0.0, term = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= -s / k;
        acc += term / k;
        if (std::abs(term) < 1e-18) break;
    }
    return acc;
}

double gl_panel(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

// C ln2 = int_0^inf phi(s) P'(s) ds with P the (product) MGF. The kernel's
// gamma_E + ln s part is integrated by parts analytically:
//   int (gamma_E + ln s) P' ds = -gamma_E - int_0^1 (P-1)/s ds - int_1^inf P/s ds
// and the remainder phi_regular is handled by the trigonometric node rule.
// The two tail integrals run in log coordinates with a panel on the MGF's
// transition layer near s = 1/E[gamma].
double capacity_sum(const FeederConfig& cfg, int order) {
    const bool stbc = cfg.gateways.size() == 2;
    const auto mgf = [&](double s) {
        double m = mgf_gamma1(s, cfg.avg_snr(0), cfg.gateways[0].turbulence);
        if (stbc) m *= mgf_gamma1(s, cfg.avg_snr(1), cfg.gateways[1].turbulence);
        return m;
    };
    const auto bracket = [&](double s) {
        if (!stbc) return mgf_gamma1_deriv(s, cfg.avg_snr(0), cfg.gateways[0].turbulence);
        const double m1 = mgf_gamma1(s, cfg.avg_snr(0), cfg.gateways[0].turbulence);
        const double m2 = mgf_gamma1(s, cfg.avg_snr(1), cfg.gateways[1].turbulence);
        const double d1 = mgf_gamma1_deriv(s, cfg.avg_snr(0), cfg.gateways[0].turbulence);
        const double d2 = mgf_gamma1_deriv(s, cfg.avg_snr(1), cfg.gateways[1].turbulence);
        return m1 * d2 + m2 * d1;
    };

    const CapacityNodes nodes = capacity_quadrature({order});
    double acc = 0.0;
    for (std::size_t t = 0; t < nodes.s.size(); ++t)
        acc += nodes.weight[t] * phi_regular(nodes.s[t]) * bracket(nodes.s[t]);

    double mean_snr = 0.0;
    for (std::size_t i = 0; i < cfg.gateways.size(); ++i)
        mean_snr += cfg.avg_snr(static_cast<int>(i)) *
                    malaga_second_moment(cfg.gateways[i].turbulence);
    const double v_star = -std::log(mean_snr);
    const double lo = std::min(v_star - 35.0, -35.0);
    const double mid_l = std::min(v_star - 6.0, -6.0);
    const double mid_r = std::min(v_star + 6.0, -1e-9);
    const auto layer = [&](double v) { return mgf(std::exp(v)) - 1.0; };
    acc -= gl_panel(layer, lo, mid_l, 16) + gl_panel(layer, mid_l, mid_r, 16) +
           gl_panel(layer, mid_r, 0.0, 16);
    const auto tail = [&](double u) { return mgf(std::exp(u)); };
    acc -= gl_panel(tail, 0.0, 6.0, 16) + gl_panel(tail, 6.0, 16.0, 16) +
           gl_panel(tail, 16.0, 40.0, 16);
    acc -= kEulerGamma;
    return acc / std::numbers::ln2;
}

} // namespace

FeederCapacityResult feeder_capacity(const FeederConfig& cfg, const QuadratureSpec& q) {
    cfg.validate();
    q.validate();
    FeederCapacityResult r;
    r.order = q.order;
    r.value = capacity_sum(cfg, q.order);
    if (q.order >= 2) {
        const double half = capacity_sum(cfg, q.order / 2);
        r.convergence_estimate = std::abs(r.value - half);
        r.accuracy_warning = r.convergence_estimate > 0.01 * std::abs(r.value);
    }
    return r;
}

McEstimate feeder_capacity_mc(const RngStream& rng, const FeederConfig& cfg, long n) {
    cfg.validate();
    if (n < 10000) throw std::invalid_argument("feeder_capacity_mc: need n >= 1e4");
    auto eng = rng.make_engine();
    const bool stbc = cfg.gateways.size() == 2;
    long double sum = 0.0L, sum2 = 0.0L;
    for (long i = 0; i < n; ++i) {
        const double i1 = cfg.gateways[0].path.gain() *
                          malaga_draw(eng, cfg.gateways[0].turbulence);
        const double i2 = stbc ? cfg.gateways[1].path.gain() *
                                     malaga_draw(eng, cfg.gateways[1].turbulence)
                               : 0.0;
        const double v = std::log2(1.0 + stbc_snr(i1, i2, cfg));
        sum += v;
        sum2 += static_cast<long double>(v) * v;
    }
    McEstimate e;
    e.n = n;
    e.mean = static_cast<double>(sum / n);
    const double var = std::max(0.0, static_cast<double>(sum2 / n) - e.mean * e.mean);
    e.std_error = std::sqrt(var / n);
    return e;
}

} // namespace htsim
