#include "screening/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "screening/quadrature.hpp"
#include "screening/random.hpp"

namespace screening {

namespace {

// Unit-mass radial potential of a component at distance r from its centre.
double profile(ComponentKind kind, double a, double r) {
    switch (kind) {
        case ComponentKind::Point:
            if (r == 0.0) throw std::domain_error("point potential evaluated at its own location");
            return 1.0 / r;
        case ComponentKind::Shell:
            return 1.0 / std::max(r, a);
        case ComponentKind::Ball:
            return r >= a ? 1.0 / r : (3.0 * a * a - r * r) / (2.0 * a * a * a);
    }
    return 0.0;
}

// H(t) = integral_0^t profile(s) * s ds, closed form.
double profile_H(ComponentKind kind, double a, double t) {
    switch (kind) {
        case ComponentKind::Point:
            return t;
        case ComponentKind::Shell:
            return t <= a ? t * t / (2.0 * a) : t - 0.5 * a;
        case ComponentKind::Ball:
            return t <= a ? 3.0 * t * t / (4.0 * a) - t * t * t * t / (8.0 * a * a * a)
                          : t - 3.0 * a / 8.0;
    }
    return 0.0;
}

// K(t) = integral_0^t profile(s) * s^2 ds, closed form.
double profile_K(ComponentKind kind, double a, double t) {
    switch (kind) {
        case ComponentKind::Point:
            return 0.5 * t * t;
        case ComponentKind::Shell:
            return t <= a ? t * t * t / (3.0 * a) : a * a / 3.0 + 0.5 * (t * t - a * a);
        case ComponentKind::Ball:
            return t <= a ? t * t * t / (2.0 * a) - std::pow(t, 5) / (10.0 * a * a * a)
                          : 2.0 * a * a / 5.0 + 0.5 * (t * t - a * a);
    }
    return 0.0;
}

int kind_rank(ComponentKind k) {
    switch (k) {
        case ComponentKind::Point: return 0;
        case ComponentKind::Shell: return 1;
        case ComponentKind::Ball: return 2;
    }
    return 0;
}

// Unit-mass interaction of a source component (kind, radius a) averaged over
// a target shape (kind, radius b) at centre distance D. Newton closed forms
// throughout; the ball-target case integrates a piecewise polynomial exactly
// on Gauss panels split at its breakpoints.
double unit_interaction(ComponentKind src, double a, ComponentKind tgt, double b, double D) {
    switch (tgt) {
        case ComponentKind::Point:
            return profile(src, a, D);
        case ComponentKind::Shell:
            if (D == 0.0) return profile(src, a, b);
            return (profile_H(src, a, D + b) - profile_H(src, a, std::abs(D - b))) / (2.0 * b * D);
        case ComponentKind::Ball: {
            if (D == 0.0) return 3.0 * profile_K(src, a, b) / (b * b * b);
            auto f = [&](double r) {
                return r * (profile_H(src, a, D + r) - profile_H(src, a, std::abs(D - r)));
            };
            const double integral =
                gauss_integrate_piecewise(f, 0.0, b, {a - D, D - a, D + a, D}, 20);
            return 3.0 * integral / (2.0 * D * b * b * b);
        }
    }
    return 0.0;
}

}  // namespace

double component_potential(const MeasureComponent& c, const Vec3& x) {
    return c.mass * profile(c.kind, c.radius, distance(x, c.center));
}

double shell_potential(const MeasureComponent& shell, const Vec3& x) {
    if (shell.kind != ComponentKind::Shell)
        throw std::invalid_argument("shell_potential: component is not a shell");
    return component_potential(shell, x);
}

ExtReal component_interaction(const MeasureComponent& c1, const MeasureComponent& c2) {
    const double D = distance(c1.center, c2.center);
    if (c1.kind == ComponentKind::Point && c2.kind == ComponentKind::Point && D == 0.0)
        return ExtReal::infinity();
    // Canonical source/target order keeps the evaluation symmetric in (c1, c2).
    const MeasureComponent* src = &c1;
    const MeasureComponent* tgt = &c2;
    if (kind_rank(c1.kind) > kind_rank(c2.kind) ||
        (c1.kind == c2.kind && c1.radius > c2.radius))
        std::swap(src, tgt);
    return ExtReal(c1.mass * c2.mass *
                   unit_interaction(src->kind, src->radius, tgt->kind, tgt->radius, D));
}

double average_over_component(const std::function<double(double)>& g, const MeasureComponent& c,
                              double D, double tol) {
    switch (c.kind) {
        case ComponentKind::Point:
            return g(D);
        case ComponentKind::Shell: {
            const double a = c.radius;
            if (D == 0.0) return g(a);
            auto f = [&](double s) { return g(s) * s; };
            return adaptive_gauss(f, std::abs(D - a), D + a, tol) / (2.0 * a * D);
        }
        case ComponentKind::Ball: {
            const double a = c.radius;
            if (D == 0.0) {
                auto f = [&](double s) { return g(s) * s * s; };
                return 3.0 * adaptive_gauss(f, 0.0, a, tol) / (a * a * a);
            }
            double acc = 0.0;
            if (D < a) {
                auto finner = [&](double s) { return 4.0 * s * s * g(s); };
                acc += adaptive_gauss(finner, 0.0, a - D, tol);
            }
            auto fslice = [&](double s) {
                const double u = D - s;
                return (s / D) * (a * a - u * u) * g(s);
            };
            acc += adaptive_gauss(fslice, std::abs(a - D), a + D, tol);
            return 3.0 * acc / (4.0 * a * a * a);
        }
    }
    return 0.0;
}

double component_interaction_truncated(const MeasureComponent& c1, const MeasureComponent& c2,
                                       double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("truncated interaction: alpha must be positive");
    const double D = distance(c1.center, c2.center);
    const MeasureComponent* src = &c1;
    const MeasureComponent* tgt = &c2;
    if (kind_rank(c1.kind) > kind_rank(c2.kind) ||
        (c1.kind == c2.kind && c1.radius > c2.radius))
        std::swap(src, tgt);
    // Truncation min(1/r, 1/alpha) is the potential profile of a unit shell
    // of radius alpha, so the truncated kernel is the exact kernel smeared by
    // that shell: smear the source profile, then average over the target.
    const ComponentKind sk = src->kind;
    const double sa = src->radius;
    auto smeared = [&](double r) { return unit_interaction(sk, sa, ComponentKind::Shell, alpha, r); };
    const MeasureComponent unit_target{tgt->kind, tgt->center, tgt->radius, 1.0};
    return c1.mass * c2.mass * average_over_component(smeared, unit_target, D, 1e-12);
}

ExtReal continuum_energy(const CompositeMeasure& mu, const NuclearConfig& nuc,
                         const LimitParams& params) {
    if (params.z_fractions().size() != nuc.size())
        throw std::invalid_argument("continuum_energy: one charge fraction per nucleus required");
    const double d = nuc.hardcore_radius();
    for (const auto& c : mu.components()) {
        for (const auto& R : nuc.positions()) {
            const double D = distance(c.center, R);
            double support_dist = 0.0;
            switch (c.kind) {
                case ComponentKind::Point: support_dist = D; break;
                case ComponentKind::Shell: support_dist = std::abs(D - c.radius); break;
                case ComponentKind::Ball: support_dist = std::max(0.0, D - c.radius); break;
            }
            if (support_dist < d)
                throw std::domain_error("continuum_energy: component support intersects a hard core");
        }
    }
    if (mu.has_point_mass()) return ExtReal::infinity();
    const double lambda = params.lambda();
    if (mu.total_mass() > lambda + 1e-12 * std::max(1.0, lambda)) return ExtReal::infinity();

    KahanSum attraction;
    for (const auto& c : mu.components())
        for (std::size_t a = 0; a < nuc.size(); ++a)
            attraction.add(-params.z_fractions()[a] * component_potential(c, nuc.positions()[a]));

    KahanSum pair;
    const auto& comps = mu.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        for (std::size_t j = i; j < comps.size(); ++j) {
            const ExtReal u = component_interaction(comps[i], comps[j]);
            if (u.is_infinite()) return ExtReal::infinity();
            pair.add((i == j ? 1.0 : 2.0) * u.value());
        }
    }
    return ExtReal(attraction.value() + 0.5 * pair.value());
}

double coulomb_self_energy(const CompositeMeasure& mu) {
    if (mu.has_point_mass())
        throw std::domain_error("coulomb_self_energy: point atom has infinite self-energy");
    KahanSum pair;
    const auto& comps = mu.components();
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t j = i; j < comps.size(); ++j)
            pair.add((i == j ? 1.0 : 2.0) * component_interaction(comps[i], comps[j]).value());
    return 0.5 * pair.value();
}

double coulomb_cross_energy(const CompositeMeasure& mu1, const CompositeMeasure& mu2) {
    KahanSum cross;
    for (const auto& a : mu1.components()) {
        for (const auto& b : mu2.components()) {
            const ExtReal u = component_interaction(a, b);
            if (u.is_infinite())
                throw std::domain_error("coulomb_cross_energy: coincident point atoms");
            cross.add(u.value());
        }
    }
    return cross.value();
}

double coulomb_norm(const CompositeMeasure& mu1, const CompositeMeasure& mu2) {
    if (mu1.has_point_mass() || mu2.has_point_mass())
        throw std::domain_error("coulomb_norm: point atom has infinite self-energy");
    return coulomb_self_energy(mu1) - coulomb_cross_energy(mu1, mu2) + coulomb_self_energy(mu2);
}

double RadialFormFactor::evaluate(double k) const {
    const double x = k * scale;
    switch (kind) {
        case ComponentKind::Point:
            return mass;
        case ComponentKind::Shell: {
            if (std::abs(x) < 1e-4) return mass * (1.0 - x * x / 6.0 + x * x * x * x / 120.0);
            return mass * std::sin(x) / x;
        }
        case ComponentKind::Ball: {
            if (std::abs(x) < 1e-3) return mass * (1.0 - x * x / 10.0 + x * x * x * x / 280.0);
            return mass * 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
        }
    }
    return 0.0;
}

namespace {

double sinc(double t) {
    if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0;
    return std::sin(t) / t;
}

// Envelope |g(k)| <= coeff / k^expo for the tail bound.
void envelope(const MeasureComponent& c, double& coeff, double& expo) {
    switch (c.kind) {
        case ComponentKind::Point: coeff = 1.0; expo = 0.0; break;
        case ComponentKind::Shell: coeff = 1.0 / c.radius; expo = 1.0; break;
        case ComponentKind::Ball: coeff = 6.0 / (c.radius * c.radius); expo = 2.0; break;
    }
}

// (1/pi) * integral over [0, K_tail] of g_i g_j j0(k D) exp(-eps k^2) dk,
// with K_tail chosen so the analytic tail bound is below 0.1 * tol.
double fourier_pair_integral(const MeasureComponent& ci, const MeasureComponent& cj, double eps,
                             double tol) {
    const double D = distance(ci.center, cj.center);
    const RadialFormFactor gi = RadialFormFactor::of(ci);
    const RadialFormFactor gj = RadialFormFactor::of(cj);

    double coef_i = 1.0, exp_i = 0.0, coef_j = 1.0, exp_j = 0.0;
    envelope(ci, coef_i, exp_i);
    envelope(cj, coef_j, exp_j);
    double coef = coef_i * coef_j * ci.mass * cj.mass;
    double p = exp_i + exp_j;
    if (D > 0.0) {
        coef /= D;
        p += 1.0;
    }
    if (p < 2.0)
        throw std::domain_error("fourier energy: pair with non-integrable tail (point atoms)");
    double K = std::pow(10.0 * coef / (std::numbers::pi * (p - 1.0) * tol), 1.0 / (p - 1.0));
    const double scale = std::max({D, ci.radius, cj.radius});
    K = std::max(K, 40.0 / scale);
    if (eps > 0.0) K = std::min(K, std::sqrt(80.0 / eps));
    K = std::min(K, 5.0e6);

    const double panel = std::numbers::pi / (2.0 * scale);
    const std::size_t n_panels = static_cast<std::size_t>(std::ceil(K / panel));
    auto f = [&](double k) {
        double v = gi.evaluate(k) * gj.evaluate(k) * sinc(k * D);
        if (eps > 0.0) v *= std::exp(-eps * k * k);
        return v;
    };
    KahanSum sum;
    for (std::size_t ip = 0; ip < n_panels; ++ip) {
        const double lo = ip * panel;
        const double hi = std::min(K, lo + panel);
        sum.add(gauss_integrate(f, lo, hi, 15));
        if (hi >= K) break;
    }
    return sum.value() / std::numbers::pi;
}

ExtReal fourier_difference_energy(const CompositeMeasure& mu1, const CompositeMeasure& mu2,
                                  double eps, double abs_tol) {
    if (mu1.has_point_mass() || mu2.has_point_mass())
        throw std::domain_error("fourier energy: point atom has infinite self-energy");
    const double m1 = mu1.total_mass();
    const double m2 = mu2.total_mass();
    if (std::abs(m1 - m2) > 1e-9 * std::max({1.0, m1, m2})) return ExtReal::infinity();

    struct Signed {
        MeasureComponent c;
        double sign;
    };
    std::vector<Signed> comps;
    for (const auto& c : mu1.components()) comps.push_back({c, 1.0});
    for (const auto& c : mu2.components()) comps.push_back({c, -1.0});
    if (comps.empty()) return ExtReal(0.0);

    const std::size_t n = comps.size();
    const double pair_tol = abs_tol / static_cast<double>(n * n);
    KahanSum sum;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v =
                fourier_pair_integral(comps[i].c, comps[j].c, eps, pair_tol);
            sum.add((i == j ? 1.0 : 2.0) * comps[i].sign * comps[j].sign * v);
        }
    }
    return ExtReal(sum.value());
}

}  // namespace

ExtReal fourier_energy(const CompositeMeasure& mu1, const CompositeMeasure& mu2, double abs_tol) {
    return fourier_difference_energy(mu1, mu2, 0.0, abs_tol);
}

ExtReal mollified_energy(const CompositeMeasure& mu1, const CompositeMeasure& mu2, double eps,
                         double abs_tol) {
    if (eps < 0.0) throw std::invalid_argument("mollified_energy: eps must be nonnegative");
    return fourier_difference_energy(mu1, mu2, eps, abs_tol);
}

MinimizerResult explicit_minimizer(const NuclearConfig& nuc, const LimitParams& params) {
    if (params.z_fractions().size() != nuc.size())
        throw std::invalid_argument("explicit_minimizer: one charge fraction per nucleus required");
    const double d = nuc.hardcore_radius();
    const double z = params.total_z();
    const double lambda = params.lambda();
    MinimizerResult out;
    out.saturated_mass = std::min(lambda, z);
    if (nuc.size() == 1) {
        const double c = out.saturated_mass;
        if (c > 0.0) out.measure.add(MeasureComponent::shell(nuc.positions()[0], d, c));
        out.energy = -z * c / d + c * c / (2.0 * d);
        return out;
    }
    if (lambda < z - 1e-12)
        throw std::invalid_argument(
            "explicit_minimizer: no closed form for molecular positive ions (lambda < z)");
    KahanSum e;
    for (std::size_t a = 0; a < nuc.size(); ++a) {
        const double za = params.z_fractions()[a];
        if (za > 0.0) out.measure.add(MeasureComponent::shell(nuc.positions()[a], d, za));
        e.add(-za * za / (2.0 * d));
    }
    for (std::size_t a = 0; a + 1 < nuc.size(); ++a)
        for (std::size_t b = a + 1; b < nuc.size(); ++b)
            e.add(-params.z_fractions()[a] * params.z_fractions()[b] /
                  distance(nuc.positions()[a], nuc.positions()[b]));
    out.energy = e.value();
    return out;
}

double radial_energy(const RadialMeasure& nu, double z) {
    const auto& r = nu.radii();
    const auto& m = nu.masses();
    KahanSum e;
    for (std::size_t i = 0; i < r.size(); ++i) e.add(-z * m[i] / r[i]);
    KahanSum pair;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            pair.add(m[i] * m[j] * std::min(1.0 / r[i], 1.0 / r[j]));
    return e.value() + 0.5 * pair.value();
}

namespace {

// Euclidean projection onto {m >= 0, sum m <= cap}.
std::vector<double> project_capped_simplex(std::vector<double> m, double cap) {
    double s = 0.0;
    for (auto& v : m) {
        v = std::max(v, 0.0);
        s += v;
    }
    if (s <= cap) return m;
    // Project onto the simplex {m >= 0, sum m = cap}.
    std::vector<double> sorted = m;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cum += sorted[i];
        const double t = (cum - cap) / static_cast<double>(i + 1);
        if (t < sorted[i]) {
            tau = t;
            k = static_cast<int>(i + 1);
        }
    }
    (void)k;
    for (auto& v : m) v = std::max(v - tau, 0.0);
    return m;
}

}  // namespace

RadialMeasure radial_minimize(double z, double lambda, const std::vector<double>& grid) {
    bool has_one = false;
    for (double r : grid) {
        if (!(r >= 1.0)) throw std::invalid_argument("radial_minimize: grid radii must be >= 1");
        if (std::abs(r - 1.0) <= 1e-12) has_one = true;
    }
    if (!has_one) throw std::invalid_argument("radial_minimize: grid must include r = 1");
    if (lambda < 0.0) throw std::invalid_argument("radial_minimize: lambda must be >= 0");

    const std::size_t n = grid.size();
    std::vector<double> m(n, 0.0);
    auto gradient = [&](const std::vector<double>& v) {
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = -z / grid[i];
            for (std::size_t j = 0; j < n; ++j)
                acc += v[j] * std::min(1.0 / grid[i], 1.0 / grid[j]);
            g[i] = acc;
        }
        return g;
    };
    auto value = [&](const std::vector<double>& v) {
        return radial_energy(RadialMeasure(grid, v), z);
    };

    double step = 1.0;
    std::vector<double> g = gradient(m);
    double f = value(m);
    for (int iter = 0; iter < 200000; ++iter) {
        // Projected-gradient residual with unit trial step.
        std::vector<double> trial(n);
        for (std::size_t i = 0; i < n; ++i) trial[i] = m[i] - g[i];
        trial = project_capped_simplex(trial, lambda);
        double res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) res2 += (trial[i] - m[i]) * (trial[i] - m[i]);
        if (std::sqrt(res2) < 1e-10) break;

        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> cand(n);
            for (std::size_t i = 0; i < n; ++i) cand[i] = m[i] - t * g[i];
            cand = project_capped_simplex(cand, lambda);
            double dir_dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dir_dot += g[i] * (cand[i] - m[i]);
            const double fc = value(cand);
            if (fc <= f + 1e-4 * dir_dot) {
                m = std::move(cand);
                f = fc;
                accepted = true;
                step = t * 1.5;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        g = gradient(m);
    }
    return RadialMeasure(grid, m);
}

CompositeMeasure rotation_average(const CompositeMeasure& mu, const Vec3& center, int samples) {
    if (samples < 1) throw std::invalid_argument("rotation_average: samples must be >= 1");
    std::mt19937_64 gen(splitmix64(0x526F7441764731ull ^ static_cast<std::uint64_t>(samples)));
    CompositeMeasure out;
    for (const auto& c : mu.components()) {
        if (distance(c.center, center) == 0.0) {
            out.add(c);
            continue;
        }
        const Vec3 rel = c.center - center;
        for (int s = 0; s < samples; ++s) {
            const auto q = random_quaternion(gen);
            MeasureComponent copy = c;
            copy.center = center + rotate(q, rel);
            copy.mass = c.mass / static_cast<double>(samples);
            out.add(copy);
        }
    }
    return out;
}

}  // namespace screening
