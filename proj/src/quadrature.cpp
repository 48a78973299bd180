#include "screening/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace screening {

namespace {

GaussRule make_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n, Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gauss_rule(order)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule& rule = gauss_rule(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

double gauss_integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                 std::vector<double> breakpoints, int order) {
    if (!(b > a)) return 0.0;
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    double total = 0.0;
    double lo = a;
    for (double bp : breakpoints) {
        const double hi = std::clamp(bp, a, b);
        if (hi > lo + 0.0) {
            total += gauss_integrate(f, lo, hi, order);
            lo = hi;
        }
    }
    if (b > lo) total += gauss_integrate(f, lo, b, order);
    return total;
}

namespace {

double adaptive_gauss_rec(const std::function<double(double)>& f, double a, double b,
                          double whole, double abs_tol, int depth, int max_depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_integrate(f, a, mid, 15);
    const double right = gauss_integrate(f, mid, b, 15);
    if (depth >= max_depth) return left + right;
    if (std::abs(left + right - whole) <= abs_tol) return left + right;
    return adaptive_gauss_rec(f, a, mid, left, 0.5 * abs_tol, depth + 1, max_depth) +
           adaptive_gauss_rec(f, mid, b, right, 0.5 * abs_tol, depth + 1, max_depth);
}

}  // namespace

double adaptive_gauss(const std::function<double(double)>& f, double a, double b, double abs_tol,
                      int max_depth) {
    if (!(b > a)) return 0.0;
    const double whole = gauss_integrate(f, a, b, 15);
    return adaptive_gauss_rec(f, a, b, whole, abs_tol, 0, max_depth);
}

}  // namespace screening
