#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

namespace htsim {

// Thrown when a contour integration or series fails to meet its internal
// consistency check; message carries the diagnostics.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First-kind Bessel J_n, integer order n >= 0. Accurate to better than
// 1e-10 relative for |x| <= 50.
double bessel_j(int n, double x);

// Kummer confluent hypergeometric 1F1(a; b; x). b must not be a
// non-positive integer. Terminates exactly when a is a non-positive integer.
double hyp1f1(double a, double b, double x);

// Exponential integral E1(x), x > 0.
double expint_e1(double x);

// exp(x) * E1(x) without overflow, x > 0.
double e1_scaled(double x);

// Exponential integral Ei(x) for x < 0 only (Ei(x) = -E1(-x)).
double expint_ei(double x);

// log Gamma of a complex argument (Lanczos; any branch, intended for
// exp(sum of lgammas) use).
std::complex<double> lgamma_complex(std::complex<double> z);

// Meijer G^{2,0}_{0,2}[x | -; a,b] = 2 x^{(a+b)/2} K_{a-b}(2 sqrt(x)), x > 0.
struct MeijerParams2002 {
    double a = 0;
    double b = 0;
};
double meijer_g_2002(double x, const MeijerParams2002& p);

// Meijer G^{1,4}_{4,1}[x | upper; lower], x > 0, evaluated by Mellin-Barnes
// contour integration along a vertical line placed between the pole ladders
// (left poles at upper[i]-1-n from the Gamma(1-a_i+s) factors, right poles
// at lower+n from Gamma(lower-s)). Every call is evaluated at two panel
// resolutions; disagreement raises ConvergenceError.
struct MeijerParams1441 {
    std::array<double, 4> upper{};
    double lower = 0;
};
double meijer_g_1441(double x, const MeijerParams1441& p);

// Capacity quadrature kernel phi(s) = -G^{0,2}_{2,1}[1/s | 1,1; 0] for s > 0.
// Reduces to Ei(-s); the reduction is pinned against a Mellin-Barnes oracle
// in the test suite.
double phi_node(double s);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Chi-square survival function with dof degrees of freedom.
double chi_square_sf(double stat, int dof);

// psi_q(w) = int_0^inf t^q e^{-t} / (w + t) dt for q = 0..q_max, w > 0.
// Forward recurrence psi_q = Gamma(q) - w psi_{q-1} while it is stable,
// otherwise a per-q Stieltjes J-fraction tied to the generalized Laguerre
// recurrence coefficients.
std::vector<double> psi_integrals(int q_max, double w);

} // namespace htsim
