#pragma once

#include <functional>
#include <vector>

namespace htsim {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on P_n and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

struct QuadResult {
    double value = 0;
    double abs_error = 0; // estimated
    int evaluations = 0;
    bool converged = true;
};

// Adaptive Gauss quadrature on [a, b]: per-interval G15/G31 pair, interval
// bisection until the local estimate meets tol_rel*|I| + tol_abs.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double tol_rel = 1e-10, double tol_abs = 0.0,
                     int max_intervals = 4000);

// Adaptive quadrature on [a, inf) via the rational map x = a + t/(1-t).
QuadResult integrate_semi_infinite(const std::function<double(double)>& f, double a,
                                   double tol_rel = 1e-10, double tol_abs = 0.0,
                                   int max_intervals = 4000);

} // namespace htsim
