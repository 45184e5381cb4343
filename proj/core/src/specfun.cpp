#include "htsim/specfun.hpp"

#include "htsim/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace htsim {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

bool is_nonpositive_integer(double v) {
    return v <= 0.0 && v == std::floor(v);
}

} // namespace

double bessel_j(int n, double x) {
    if (n < 0) throw std::invalid_argument("bessel_j: order must be >= 0");
    if (!std::isfinite(x)) throw std::invalid_argument("bessel_j: non-finite argument");
    double v = std::cyl_bessel_j(static_cast<double>(n), std::abs(x));
    if (x < 0 && (n & 1)) v = -v; // J_n(-x) = (-1)^n J_n(x)
    return v;
}

double hyp1f1(double a, double b, double x) {
    if (is_nonpositive_integer(b))
        throw std::invalid_argument("hyp1f1: b must not be a non-positive integer");
    if (x == 0.0) return 1.0;
    if (is_nonpositive_integer(a)) {
        // polynomial case, exact termination after -a+1 terms
        const int terms = static_cast<int>(-a);
        double sum = 1.0, term = 1.0;
        for (int k = 0; k < terms; ++k) {
            term *= (a + k) / (b + k) * x / (k + 1);
            sum += term;
        }
        return sum;
    }
    if (x < 0.0) {
        // Kummer transform keeps the series argument positive
        return std::exp(x) * hyp1f1(b - a, b, -x);
    }
    if (x > 700.0) throw std::overflow_error("hyp1f1: argument too large for double range");
    double sum = 1.0, term = 1.0;
    for (int k = 0; k < 20000; ++k) {
        term *= (a + k) / (b + k) * x / (k + 1);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
    }
    throw ConvergenceError("hyp1f1: series did not converge");
}

double expint_e1(double x) {
    if (x <= 0.0) throw std::invalid_argument("expint_e1: requires x > 0");
    if (x <= 1.0) {
        // ascending series, DLMF 6.6.2
        double sum = -kEulerGamma - std::log(x);
        double term = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= -x / k;
            double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    double ex = std::exp(-x);
    if (ex == 0.0) return 0.0;
    return ex * e1_scaled(x);
}

double e1_scaled(double x) {
    if (x <= 0.0) throw std::invalid_argument("e1_scaled: requires x > 0");
    if (x <= 1.0) return std::exp(x) * expint_e1(x);
    // modified Lentz on E1(x) e^x = 1/(x+1- 1/(x+3- 4/(x+5- 9/(...))))
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int k = 1; k < 400; ++k) {
        double an = -static_cast<double>(k) * k;
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return f;
    }
    throw ConvergenceError("e1_scaled: continued fraction did not converge");
}

double expint_ei(double x) {
    if (x >= 0.0) throw std::invalid_argument("expint_ei: requires x < 0");
    return -expint_e1(-x);
}

std::complex<double> lgamma_complex(std::complex<double> z) {
    using cplx = std::complex<double>;
    static const double g[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    const double pi = std::numbers::pi;
    if (z.real() < 0.5) {
        // reflection; branch of log sin is irrelevant for exp(sum) use
        cplx ls;
        double y = z.imag();
        if (std::abs(y) <= 1.0) {
            ls = std::log(std::sin(pi * z));
        } else if (y > 0.0) {
            ls = cplx(0, -pi) * z + cplx(0, pi / 2) - std::log(2.0) +
                 std::log(1.0 - std::exp(cplx(0, 2 * pi) * z));
        } else {
            ls = cplx(0, pi) * z - cplx(0, pi / 2) - std::log(2.0) +
                 std::log(1.0 - std::exp(cplx(0, -2 * pi) * z));
        }
        return std::log(pi) - ls - lgamma_complex(1.0 - z);
    }
    cplx zz = z - 1.0;
    cplx acc = g[0];
    for (int i = 1; i < 9; ++i) acc += g[i] / (zz + static_cast<double>(i));
    cplx t = zz + 7.5;
    return 0.5 * std::log(2 * pi) + (zz + 0.5) * std::log(t) - t + std::log(acc);
}

double meijer_g_2002(double x, const MeijerParams2002& p) {
    if (!(x > 0.0)) throw std::invalid_argument("meijer_g_2002: requires x > 0");
    const double order = std::abs(p.a - p.b); // K_nu = K_{-nu}
    const double root = 2.0 * std::sqrt(x);
    if (root > 1400.0) return 0.0; // K underflows, value below double range
    return 2.0 * std::pow(x, 0.5 * (p.a + p.b)) * std::cyl_bessel_k(order, root);
}

namespace {

// One pass of the G^{1,4}_{4,1} Mellin-Barnes integral at a given panel
// density. Conjugate symmetry restricts the contour to t >= 0.
double g1441_contour(double x, const MeijerParams1441& p, double c,
                     double panels_per_cycle) {
    const double pi = std::numbers::pi;
    const double lnx = std::log(x);
    const double tmax = 12.0; // Gamma-product decay ~exp(-5 pi t / 2)
    const double cycles = tmax * (std::abs(lnx) + 6.0) / (2 * pi);
    const int panels = std::max(32, static_cast<int>(std::ceil(cycles * panels_per_cycle)));
    const GaussRule& rule = gauss_legendre(16);

    double total = 0.0;
    const double h = tmax / panels;
    for (int i = 0; i < panels; ++i) {
        const double mid = (i + 0.5) * h, half = 0.5 * h;
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const std::complex<double> s(c, mid + half * rule.nodes[k]);
            std::complex<double> lg = lgamma_complex(p.lower - s);
            for (double a : p.upper) lg += lgamma_complex(1.0 - a + s);
            acc += rule.weights[k] * std::exp(lg + s * lnx).real();
        }
        total += half * acc;
    }
    return total / pi;
}

} // namespace

double meijer_g_1441(double x, const MeijerParams1441& p) {
    if (!(x > 0.0)) throw std::invalid_argument("meijer_g_1441: requires x > 0");
    const double left = *std::max_element(p.upper.begin(), p.upper.end()) - 1.0;
    const double right = p.lower;
    if (!(left < right))
        throw std::invalid_argument("meijer_g_1441: pole ladders leave no contour strip");
    // x^c cancellation control: hug the pole ladder the argument decays away
    // from (small x decays to the right, large x to the left)
    const double margin = 0.5 * std::min(right - left, 0.5);
    const double c = (x <= 1.0) ? right - margin : left + margin;

    const double v1 = g1441_contour(x, p, c, 2.0);
    const double v2 = g1441_contour(x, p, c, 3.0);
    const double scale = std::max({std::abs(v1), std::abs(v2), 1e-300});
    if (std::abs(v1 - v2) > 1e-7 * scale) {
        std::ostringstream os;
        os << "meijer_g_1441: contour resolutions disagree (x=" << x << ", c=" << c
           << ", coarse=" << v1 << ", fine=" << v2 << ")";
        throw ConvergenceError(os.str());
    }
    return v2;
}

double phi_node(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("phi_node: requires s > 0");
    return expint_ei(-s);
}

namespace {

// series for P(a,x), x < a+1
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw ConvergenceError("gamma_p: series did not converge");
}

// continued fraction for Q(a,x), x >= a+1
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw ConvergenceError("gamma_q: continued fraction did not converge");
}

} // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double stat, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_sf: dof must be >= 1");
    if (stat <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * stat);
}

namespace {

// J-fraction for psi_q: Stieltjes transform of the generalized Laguerre
// weight t^q e^{-t}, recurrence a_i = 2i+q+1, b_i = i(i+q).
double psi_jfraction(int q, double w) {
    const double tiny = 1e-300;
    double b = w + q + 1.0;
    double c = b, d = 0.0, f = b;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (i + q);
        const double bn = w + 2.0 * i + q + 1.0;
        d = bn + an * d;
        if (d == 0.0) d = tiny;
        c = bn + an / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return std::tgamma(q + 1.0) / f;
    }
    throw ConvergenceError("psi_integrals: J-fraction did not converge");
}

} // namespace

std::vector<double> psi_integrals(int q_max, double w) {
    if (q_max < 0) throw std::invalid_argument("psi_integrals: q_max must be >= 0");
    if (!(w > 0.0)) throw std::invalid_argument("psi_integrals: requires w > 0");
    std::vector<double> psi(q_max + 1);
    // forward recurrence loses ~w^q/q! in relative precision; switch to the
    // J-fraction when that exceeds ~1e4 ulp
    const double loss = q_max * std::log(w) - std::lgamma(q_max + 1.0);
    if (loss <= std::log(1e4)) {
        psi[0] = e1_scaled(w);
        double gam = 1.0; // Gamma(q)
        for (int q = 1; q <= q_max; ++q) {
            psi[q] = gam - w * psi[q - 1];
            gam *= q;
        }
    } else {
        for (int q = 0; q <= q_max; ++q) psi[q] = psi_jfraction(q, w);
    }
    return psi;
}

} // namespace htsim
