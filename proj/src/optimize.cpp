#include "screening/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "screening/random.hpp"

namespace screening {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kStepCapFactor = 0.5;  // max step per electron per iteration, in units of d

// R + d * direction, guaranteed admissible: rounding may land one ulp
// inside the sphere, in which case the offset is inflated minimally.
Vec3 snap_to_sphere(const Vec3& R, double d, const Vec3& direction) {
    Vec3 dir = normalized(direction);
    Vec3 p = R + dir * d;
    for (int guard = 0; guard < 8 && distance(p, R) < d; ++guard) {
        dir *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
        p = R + dir * d;
    }
    return p;
}

void project_feasible(std::vector<Vec3>& x, const NuclearConfig& nuc) {
    const double d = nuc.hardcore_radius();
    for (auto& p : x) {
        const auto [dist, idx] = nuc.nearest_nucleus(p);
        if (dist < d) {
            const Vec3& R = nuc.positions()[idx];
            p = snap_to_sphere(R, d, dist == 0.0 ? Vec3{1.0, 0.0, 0.0} : p - R);
        }
    }
}

// KKT residual: the gradient with the outward-normal component removed on
// active spheres when the multiplier is admissible.
double kkt_residual(const std::vector<Vec3>& x, const std::vector<Vec3>& g,
                    const NuclearConfig& nuc) {
    const double d = nuc.hardcore_radius();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto [dist, idx] = nuc.nearest_nucleus(x[i]);
        Vec3 res = g[i];
        if (std::abs(dist - d) <= 1e-9 * d && dist > 0.0) {
            const Vec3 n = (x[i] - nuc.positions()[idx]) / dist;
            const double gn = dot(g[i], n);
            if (gn > 0.0) res = g[i] - n * gn;
        }
        acc += res.norm2();
    }
    return std::sqrt(acc);
}

struct LocalRun {
    std::vector<Vec3> x;
    double f = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

double total_energy(const std::vector<Vec3>& x, const NuclearConfig& nuc) {
    return particle_energy(ElectronConfig(x), nuc).total;
}

std::vector<Vec3> gradient(const std::vector<Vec3>& x, const NuclearConfig& nuc) {
    return particle_gradient(ElectronConfig(x), nuc);
}

Vec3 capped_step(const Vec3& g, double t, double cap) {
    Vec3 s = g * t;
    const double n = s.norm();
    if (n > cap) s *= cap / n;
    return s;
}

// Projected gradient descent with BB steps and Armijo backtracking; iterates
// stay admissible and the energy is nonincreasing.
LocalRun descend_projected(std::vector<Vec3> x, const NuclearConfig& nuc,
                           const OptimizeOptions& opts, int restart) {
    const double d = nuc.hardcore_radius();
    const double cap = kStepCapFactor * d;
    project_feasible(x, nuc);
    double f = total_energy(x, nuc);
    std::vector<Vec3> g = gradient(x, nuc);

    std::vector<Vec3> x_prev, g_prev;
    double t = 0.0;
    LocalRun run;
    run.residual = kkt_residual(x, g, nuc);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (run.residual <= opts.gradient_tolerance) break;
        if (iter == 0) {
            double gmax = 1e-300;
            for (const auto& v : g) gmax = std::max(gmax, v.norm());
            t = 0.1 * d / gmax;
        } else {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const Vec3 s = x[i] - x_prev[i];
                const Vec3 y = g[i] - g_prev[i];
                ss += dot(s, s);
                sy += dot(s, y);
            }
            t = sy > 1e-300 ? ss / sy : t * 2.0;
        }
        t = std::clamp(t, 1e-14 * d, 1e8);

        bool accepted = false;
        double step = t;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<Vec3> cand(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] - capped_step(g[i], step, cap);
            project_feasible(cand, nuc);
            double dir_dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dir_dot += dot(g[i], cand[i] - x[i]);
            const double fc = total_energy(cand, nuc);
            if (fc <= f && fc <= f + kArmijo * dir_dot) {
                x_prev = std::move(x);
                g_prev = std::move(g);
                x = std::move(cand);
                f = fc;
                g = gradient(x, nuc);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++run.iterations;
        if (!accepted) break;
        if (opts.on_iteration) opts.on_iteration(restart, run.iterations, f);
        run.residual = kkt_residual(x, g, nuc);
    }
    run.x = std::move(x);
    run.f = f;
    return run;
}

bool near_spheres(const std::vector<Vec3>& x, const NuclearConfig& nuc, double band) {
    const double d = nuc.hardcore_radius();
    for (const auto& p : x) {
        const double dist = nuc.nearest_nucleus(p).first;
        if (std::abs(dist - d) > band) return false;
    }
    return true;
}

// Riemannian descent with every electron constrained to its nearest sphere;
// positions are reconstructed as R + d * u with unit u, so the output lies
// on the spheres to rounding.
LocalRun descend_on_spheres(std::vector<Vec3> x, const NuclearConfig& nuc, double tol,
                            int max_iterations) {
    const double d = nuc.hardcore_radius();
    const double cap = kStepCapFactor * d;
    const std::size_t n = x.size();
    std::vector<int> assign(n);
    std::vector<Vec3> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [dist, idx] = nuc.nearest_nucleus(x[i]);
        assign[i] = idx;
        u[i] = dist > 0.0 ? (x[i] - nuc.positions()[idx]) / dist : Vec3{1.0, 0.0, 0.0};
        x[i] = snap_to_sphere(nuc.positions()[idx], d, u[i]);
    }
    auto tangential = [&](const std::vector<Vec3>& grad_full) {
        std::vector<Vec3> gt(n);
        for (std::size_t i = 0; i < n; ++i) gt[i] = grad_full[i] - u[i] * dot(grad_full[i], u[i]);
        return gt;
    };

    double f = total_energy(x, nuc);
    std::vector<Vec3> gt = tangential(gradient(x, nuc));
    std::vector<Vec3> x_prev, gt_prev;
    double t = 0.0;
    LocalRun run;
    auto residual = [&] {
        double acc = 0.0;
        for (const auto& v : gt) acc += v.norm2();
        return std::sqrt(acc);
    };
    run.residual = residual();
    for (int iter = 0; iter < max_iterations; ++iter) {
        if (run.residual <= tol) break;
        if (iter == 0) {
            double gmax = 1e-300;
            for (const auto& v : gt) gmax = std::max(gmax, v.norm());
            t = 0.1 * d / gmax;
        } else {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const Vec3 s = x[i] - x_prev[i];
                const Vec3 y = gt[i] - gt_prev[i];
                ss += dot(s, s);
                sy += dot(s, y);
            }
            t = sy > 1e-300 ? ss / sy : t * 2.0;
        }
        t = std::clamp(t, 1e-16 * d, 1e8);

        bool accepted = false;
        double step = t;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<Vec3> cand(n);
            std::vector<Vec3> cand_u(n);
            for (std::size_t i = 0; i < n; ++i) {
                const Vec3 moved = x[i] - capped_step(gt[i], step, cap);
                cand[i] = snap_to_sphere(nuc.positions()[assign[i]], d,
                                         moved - nuc.positions()[assign[i]]);
                cand_u[i] = normalized(cand[i] - nuc.positions()[assign[i]]);
            }
            double dir_dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dir_dot += dot(gt[i], cand[i] - x[i]);
            const double fc = total_energy(cand, nuc);
            if (fc <= f && fc <= f + kArmijo * dir_dot) {
                x_prev = std::move(x);
                gt_prev = std::move(gt);
                x = std::move(cand);
                u = std::move(cand_u);
                f = fc;
                gt = tangential(gradient(x, nuc));
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++run.iterations;
        if (!accepted) break;
        run.residual = residual();
    }
    run.x = std::move(x);
    run.f = f;
    return run;
}

std::vector<Vec3> initial_points(int N, const NuclearConfig& nuc, const OptimizeOptions& opts,
                                 int restart) {
    std::mt19937_64 gen(opts.seed ^ static_cast<std::uint64_t>(restart));
    const std::size_t M = nuc.size();
    const double Z = nuc.total_charge();

    // Proportional allocation with multinomial rounding of the remainders.
    std::vector<int> counts(M);
    std::vector<double> frac(M);
    int assigned = 0;
    for (std::size_t a = 0; a < M; ++a) {
        const double share = static_cast<double>(N) * nuc.charges()[a] / Z;
        counts[a] = static_cast<int>(std::floor(share));
        frac[a] = share - counts[a];
        assigned += counts[a];
    }
    double frac_sum = 0.0;
    for (double v : frac) frac_sum += v;
    for (int k = assigned; k < N; ++k) {
        double u = uniform01(gen) * (frac_sum > 0.0 ? frac_sum : Z);
        std::size_t pick = M - 1;
        for (std::size_t a = 0; a < M; ++a) {
            u -= frac_sum > 0.0 ? frac[a] : nuc.charges()[a];
            if (u <= 0.0) {
                pick = a;
                break;
            }
        }
        ++counts[pick];
    }

    std::vector<Vec3> pts;
    pts.reserve(N);
    const double radius = opts.initial_radius_factor * nuc.hardcore_radius();
    for (std::size_t a = 0; a < M; ++a)
        for (int k = 0; k < counts[a]; ++k)
            pts.push_back(nuc.positions()[a] + random_unit_vector(gen) * radius);
    return pts;
}

void fill_result(OptimizeResult& out, const NuclearConfig& nuc) {
    out.energy = particle_energy(out.config, nuc);
    const AbsorptionReport rep = detect_absorption(out.config, nuc, 1e-6);
    out.absorbed = rep.absorbed;
    out.per_nucleus_counts = rep.counts;
    double far = 0.0;
    for (const auto& p : out.config.points()) far = std::max(far, nuc.nearest_nucleus(p).first);
    out.farthest_distance = far;
}

}  // namespace

OptimizeResult minimize(int N, const NuclearConfig& nuc, const OptimizeOptions& opts) {
    if (N < 1) throw std::invalid_argument("minimize: N must be >= 1");
    if (opts.restarts < 1) throw std::invalid_argument("minimize: restarts must be >= 1");
    if (!(opts.initial_radius_factor >= 1.0))
        throw std::invalid_argument("minimize: initial_radius_factor must be >= 1");

    const double d = nuc.hardcore_radius();
    std::vector<LocalRun> runs(opts.restarts);
    runtime::parallel_for(static_cast<std::size_t>(opts.restarts), [&](std::size_t r) {
        LocalRun run = descend_projected(initial_points(N, nuc, opts, static_cast<int>(r)), nuc,
                                         opts, static_cast<int>(r));
        if (near_spheres(run.x, nuc, 0.05 * d)) {
            LocalRun polished = descend_on_spheres(std::move(run.x), nuc,
                                                   std::min(opts.gradient_tolerance, 1e-10),
                                                   opts.max_iterations);
            polished.iterations += run.iterations;
            run = std::move(polished);
        }
        runs[r] = std::move(run);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].f < runs[best].f) best = r;

    LocalRun winner = std::move(runs[best]);
    if (near_spheres(winner.x, nuc, 0.05 * d)) {
        LocalRun final_polish =
            descend_on_spheres(std::move(winner.x), nuc, 1e-12, 2 * opts.max_iterations);
        final_polish.iterations += winner.iterations;
        winner = std::move(final_polish);
    }

    OptimizeResult out;
    out.config = ElectronConfig(std::move(winner.x));
    out.iterations = winner.iterations;
    out.restarts_used = opts.restarts;
    out.projected_gradient_norm = winner.residual;
    fill_result(out, nuc);
    return out;
}

OptimizeResult refine_on_spheres(const OptimizeResult& result, const NuclearConfig& nuc,
                                 const OptimizeOptions& opts) {
    const double d = nuc.hardcore_radius();
    if (!result.absorbed && !near_spheres(result.config.points(), nuc, 0.05 * d))
        throw std::invalid_argument("refine_on_spheres: an electron is not near any sphere");
    LocalRun run = descend_on_spheres(result.config.points(), nuc,
                                      std::min(opts.gradient_tolerance, 1e-10),
                                      std::max(opts.max_iterations, 1));
    OptimizeResult out;
    out.config = ElectronConfig(std::move(run.x));
    out.iterations = run.iterations;
    out.restarts_used = result.restarts_used;
    out.projected_gradient_norm = run.residual;
    fill_result(out, nuc);
    return out;
}

AbsorptionReport detect_absorption(const ElectronConfig& cfg, const NuclearConfig& nuc,
                                   double tol) {
    const double d = nuc.hardcore_radius();
    AbsorptionReport rep;
    rep.absorbed = true;
    rep.counts.assign(nuc.size(), 0);
    rep.nucleus_of.reserve(cfg.size());
    for (const auto& p : cfg.points()) {
        const auto [dist, idx] = nuc.nearest_nucleus(p);
        rep.nucleus_of.push_back(idx);
        ++rep.counts[idx];
        double off = std::numeric_limits<double>::infinity();
        for (const auto& R : nuc.positions()) off = std::min(off, std::abs(distance(p, R) - d));
        if (off > tol) rep.absorbed = false;
    }
    return rep;
}

}  // namespace screening
