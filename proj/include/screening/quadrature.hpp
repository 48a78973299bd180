#pragma once

#include <functional>
#include <vector>

namespace screening {

/// Gauss-Legendre rule on [-1, 1]; nodes/weights generated once per order by
/// Newton iteration on the Legendre polynomial and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_rule(int order);

/// Fixed-order Gauss-Legendre integral of f over [a, b].
double gauss_integrate(const std::function<double(double)>& f, double a, double b,
                       int order = 20);

/// Gauss-Legendre panel integration with breakpoints: integrates exactly
/// (to rounding) any function that is polynomial of degree < 2*order between
/// consecutive breakpoints. Breakpoints outside [a, b] are ignored.
double gauss_integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                 std::vector<double> breakpoints, int order = 20);

/// Adaptive Gauss integration (G7 vs G15 error estimate, recursive
/// bisection) to absolute tolerance.
double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_depth = 40);

}  // namespace screening
