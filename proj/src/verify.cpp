#include "screening/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "screening/analysis.hpp"
#include "screening/continuum.hpp"
#include "screening/energy.hpp"
#include "screening/optimize.hpp"
#include "screening/random.hpp"
#include "screening/recover.hpp"

namespace screening {

CompositeMeasure random_composite(std::mt19937_64& gen, int max_components,
                                  const NuclearConfig* nuc) {
    const int n = 1 + static_cast<int>(uniform01(gen) * max_components);
    CompositeMeasure mu;
    for (int i = 0; i < n; ++i) {
        const bool shell = uniform01(gen) < 0.5;
        const double radius = 0.3 + 1.2 * uniform01(gen);
        const double mass = 0.2 + uniform01(gen);
        Vec3 c = random_unit_vector(gen) * (1.0 + 4.0 * uniform01(gen));
        if (nuc) {
            // Push the support clear of every hard core.
            for (int tries = 0; tries < 200; ++tries) {
                bool clear = true;
                for (const auto& R : nuc->positions()) {
                    const double D = distance(c, R);
                    const double support_dist = shell ? std::abs(D - radius) : D - radius;
                    if (support_dist < nuc->hardcore_radius() + 0.05) clear = false;
                }
                if (clear) break;
                c = random_unit_vector(gen) * (2.0 + 6.0 * uniform01(gen));
            }
        }
        mu.add(shell ? MeasureComponent::shell(c, radius, mass)
                     : MeasureComponent::ball(c, radius, mass));
    }
    return mu;
}

ElectronConfig random_admissible_config(std::mt19937_64& gen, int N, const NuclearConfig& nuc,
                                        double min_separation) {
    const double d = nuc.hardcore_radius();
    std::vector<Vec3> pts;
    while (static_cast<int>(pts.size()) < N) {
        const std::size_t a = static_cast<std::size_t>(uniform01(gen) * nuc.size()) % nuc.size();
        const Vec3 cand =
            nuc.positions()[a] + random_unit_vector(gen) * (d * (1.0 + 2.0 * uniform01(gen)));
        if (!nuc.outside_cores(cand)) continue;
        bool ok = true;
        for (const auto& p : pts)
            if (distance(p, cand) < min_separation * d) ok = false;
        if (ok) pts.push_back(cand);
    }
    return ElectronConfig(std::move(pts));
}

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Battery {
    std::vector<VerifyCheck> checks;
    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        VerifyCheck c;
        c.name = name;
        try {
            auto [ok, detail] = fn();
            c.passed = ok;
            c.detail = detail;
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail = std::string("exception: ") + e.what();
        }
        checks.push_back(std::move(c));
    }
};

NuclearConfig sample_molecule() {
    return NuclearConfig({{-1.0, 0.0, 0.0}, {1.0, 0.2, 0.0}}, {3.0, 2.0}, 0.4);
}

ElectronConfig rigid_motion(const ElectronConfig& cfg, const std::array<double, 4>& q,
                            const Vec3& shift) {
    std::vector<Vec3> pts;
    for (const auto& p : cfg.points()) pts.push_back(rotate(q, p) + shift);
    return ElectronConfig(std::move(pts));
}

NuclearConfig rigid_motion(const NuclearConfig& nuc, const std::array<double, 4>& q,
                           const Vec3& shift) {
    std::vector<Vec3> R;
    for (const auto& p : nuc.positions()) R.push_back(rotate(q, p) + shift);
    return NuclearConfig(std::move(R), nuc.charges(), nuc.hardcore_radius());
}

}  // namespace

std::vector<VerifyCheck> run_verification(std::uint64_t seed) {
    Battery battery;
    std::mt19937_64 gen(splitmix64(seed ^ 0xBA77E21ull));

    // core: admissibility invariant under simultaneous rigid motion
    battery.run("core.admissibility_rigid_motion", [&] {
        const NuclearConfig nuc = sample_molecule();
        for (int trial = 0; trial < 40; ++trial) {
            const ElectronConfig cfg = random_admissible_config(gen, 6, nuc);
            const auto q = random_quaternion(gen);
            const Vec3 shift = random_unit_vector(gen) * (3.0 * uniform01(gen));
            if (check_admissible(cfg, nuc) !=
                check_admissible(rigid_motion(cfg, q, shift), rigid_motion(nuc, q, shift)))
                return std::pair{false, std::string("mismatch at trial ") + std::to_string(trial)};
        }
        return std::pair{true, std::string("40 rigid motions")};
    });

    battery.run("core.rescale_homogeneity", [&] {
        const NuclearConfig nuc = sample_molecule();
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const ElectronConfig cfg = random_admissible_config(gen, 5, nuc);
            const double e0 = particle_energy(cfg, nuc).total;
            for (double s : {0.5, 2.0, 10.0}) {
                const auto [nuc_s, cfg_s] = rescale(nuc, cfg, s);
                const double es = particle_energy(cfg_s, nuc_s).total;
                worst = std::max(worst, std::abs(es - e0 / s) / std::abs(e0 / s));
            }
        }
        return std::pair{worst <= 1e-12, "max rel err " + fmt(worst)};
    });

    battery.run("core.empirical_mass_exact", [&] {
        const NuclearConfig nuc = sample_molecule();
        for (int trial = 0; trial < 10; ++trial) {
            const int N = 1 + static_cast<int>(uniform01(gen) * 20);
            const double Z = 1.0 + std::floor(uniform01(gen) * 30);
            const ElectronConfig cfg = random_admissible_config(gen, N, nuc);
            const EmpiricalMeasure mu = to_empirical(cfg, Z);
            if (mu.total_mass() != static_cast<double>(N) * (1.0 / Z))
                return std::pair{false, std::string("mass mismatch")};
        }
        return std::pair{true, std::string("10 cases exact")};
    });

    battery.run("energy.harmonicity_laplacian", [&] {
        const NuclearConfig nuc = sample_molecule();
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            ElectronConfig cfg = random_admissible_config(gen, 5, nuc, 0.8);
            const double h = 1e-4;
            const std::size_t i = 0;
            double lap = 0.0;
            const double f0 = particle_energy(cfg, nuc).total;
            for (int ax = 0; ax < 3; ++ax) {
                for (double s : {+1.0, -1.0}) {
                    ElectronConfig shifted = cfg;
                    Vec3& p = shifted.points()[i];
                    (ax == 0 ? p.x : ax == 1 ? p.y : p.z) += s * h;
                    lap += particle_energy(shifted, nuc).total;
                }
            }
            lap = (lap - 6.0 * f0) / (h * h);
            worst = std::max(worst, std::abs(lap));
        }
        return std::pair{worst <= 1e-3, "max |laplacian| " + fmt(worst)};
    });

    battery.run("energy.rigid_motion_invariance", [&] {
        const NuclearConfig nuc = sample_molecule();
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const ElectronConfig cfg = random_admissible_config(gen, 6, nuc);
            const auto q = random_quaternion(gen);
            const Vec3 shift = random_unit_vector(gen) * (2.0 * uniform01(gen));
            const double e0 = particle_energy(cfg, nuc).total;
            const double e1 =
                particle_energy(rigid_motion(cfg, q, shift), rigid_motion(nuc, q, shift)).total;
            worst = std::max(worst, std::abs(e1 - e0) / std::abs(e0));
        }
        return std::pair{worst <= 1e-12, "max rel err " + fmt(worst)};
    });

    battery.run("energy.gradient_finite_difference", [&] {
        const NuclearConfig nuc = sample_molecule();
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            ElectronConfig cfg = random_admissible_config(gen, 4, nuc, 0.8);
            const auto grad = particle_gradient(cfg, nuc);
            const double h = 1e-5;
            for (std::size_t i = 0; i < cfg.size(); ++i) {
                for (int ax = 0; ax < 3; ++ax) {
                    ElectronConfig plus = cfg, minus = cfg;
                    (ax == 0 ? plus.points()[i].x : ax == 1 ? plus.points()[i].y : plus.points()[i].z) += h;
                    (ax == 0 ? minus.points()[i].x : ax == 1 ? minus.points()[i].y : minus.points()[i].z) -= h;
                    const double fd = (particle_energy(plus, nuc).total -
                                       particle_energy(minus, nuc).total) / (2.0 * h);
                    const double an = ax == 0 ? grad[i].x : ax == 1 ? grad[i].y : grad[i].z;
                    worst = std::max(worst, std::abs(fd - an));
                }
            }
        }
        return std::pair{worst <= 1e-6, "max abs err " + fmt(worst)};
    });

    battery.run("energy.empirical_identity", [&] {
        const NuclearConfig nuc = sample_molecule();
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const ElectronConfig cfg = random_admissible_config(gen, 8, nuc);
            const double Z = nuc.total_charge();
            const ExtReal inz = empirical_energy(to_empirical(cfg, Z), nuc, nuc.charge_fractions());
            const double ref = particle_energy(cfg, nuc).total / (Z * Z);
            worst = std::max(worst, std::abs(inz.value() - ref) / std::abs(ref));
        }
        return std::pair{worst <= 1e-12, "max rel err " + fmt(worst)};
    });

    battery.run("energy.deterministic_parallel_sum", [&] {
        std::vector<Vec3> pts;
        std::mt19937_64 g2(7);
        for (int i = 0; i < 800; ++i)
            pts.push_back(random_unit_vector(g2) * (1.0 + uniform01(g2)));
        auto kernel = [&](std::size_t i, std::size_t j) { return 1.0 / distance(pts[i], pts[j]); };
        const double chunked = deterministic_pair_sum(pts.size(), kernel);
        KahanSum serial;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) serial.add(kernel(i, j));
        const double rel = std::abs(chunked - serial.value()) / std::abs(serial.value());
        return std::pair{rel <= 1e-12, "rel diff " + fmt(rel)};
    });

    battery.run("continuum.coulomb_norm_positivity", [&] {
        double min_norm = 1e300, max_same = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            CompositeMeasure mu1 = random_composite(gen, 3);
            CompositeMeasure mu2 = random_composite(gen, 3);
            // Rescale to equal total mass.
            const double scale = mu1.total_mass() / mu2.total_mass();
            CompositeMeasure mu2s;
            for (auto c : mu2.components()) {
                c.mass *= scale;
                mu2s.add(c);
            }
            min_norm = std::min(min_norm, coulomb_norm(mu1, mu2s));
            max_same = std::max(max_same, std::abs(coulomb_norm(mu1, mu1)));
        }
        const bool ok = min_norm >= -1e-9 && max_same <= 1e-9;
        return std::pair{ok, "min J " + fmt(min_norm) + ", max self " + fmt(max_same)};
    });

    battery.run("continuum.midpoint_convexity_identity", [&] {
        const NuclearConfig nuc = sample_molecule();
        const LimitParams params = LimitParams::unnormalized(100.0, nuc.charge_fractions());
        double worst = 0.0;
        for (int trial = 0; trial < 30; ++trial) {
            const CompositeMeasure mu1 = random_composite(gen, 3, &nuc);
            const CompositeMeasure mu2 = random_composite(gen, 3, &nuc);
            CompositeMeasure mid;
            for (auto c : mu1.components()) {
                c.mass *= 0.5;
                mid.add(c);
            }
            for (auto c : mu2.components()) {
                c.mass *= 0.5;
                mid.add(c);
            }
            const double lhs = 0.5 * (continuum_energy(mu1, nuc, params).value() +
                                      continuum_energy(mu2, nuc, params).value()) -
                               continuum_energy(mid, nuc, params).value();
            const double rhs = 0.25 * coulomb_norm(mu1, mu2);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return std::pair{worst <= 1e-9, "max abs err " + fmt(worst)};
    });

    battery.run("continuum.completing_the_square", [&] {
        const NuclearConfig nuc = sample_molecule();
        const LimitParams params(1e6, nuc.charge_fractions());
        CompositeMeasure rho;
        for (std::size_t a = 0; a < nuc.size(); ++a)
            rho.add(MeasureComponent::shell(nuc.positions()[a], nuc.hardcore_radius(),
                                            nuc.charge_fractions()[a]));
        const double J_rho = coulomb_self_energy(rho);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const CompositeMeasure mu = random_composite(gen, 3, &nuc);
            const double lhs = continuum_energy(mu, nuc, params).value();
            const double rhs = coulomb_norm(rho, mu) - J_rho;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return std::pair{worst <= 1e-9, "max abs err " + fmt(worst)};
    });

    battery.run("continuum.fourier_vs_closed_form", [&] {
        const CompositeMeasure s1({MeasureComponent::shell({0, 0, 0}, 1.0, 1.0)});
        const CompositeMeasure s2({MeasureComponent::shell({0, 0, 0}, 2.0, 1.0)});
        const CompositeMeasure b1({MeasureComponent::ball({0, 0, 0}, 1.0, 1.0)});
        const CompositeMeasure far({MeasureComponent::shell({3.0, 0.5, 0}, 1.0, 1.0)});
        double worst = 0.0;
        for (const auto& [mu1, mu2] : {std::pair{s1, s2}, std::pair{s1, b1}, std::pair{s1, far}}) {
            const double closed = coulomb_norm(mu1, mu2);
            const double fourier = fourier_energy(mu1, mu2).value();
            worst = std::max(worst, std::abs(fourier - closed) / std::max(1e-12, std::abs(closed)));
        }
        return std::pair{worst <= 1e-3, "max rel err " + fmt(worst)};
    });

    battery.run("continuum.mollified_monotone", [&] {
        const CompositeMeasure s1({MeasureComponent::shell({0, 0, 0}, 1.0, 1.0)});
        const CompositeMeasure s2({MeasureComponent::shell({0, 0, 0}, 2.0, 1.0)});
        double prev = -1e300;
        bool monotone = true;
        for (double eps : {1.0, 0.1, 0.01, 0.001}) {
            const double v = mollified_energy(s1, s2, eps).value();
            if (v < prev - 1e-9) monotone = false;
            prev = v;
        }
        return std::pair{monotone, "final " + fmt(prev)};
    });

    battery.run("continuum.minimizer_optimality", [&] {
        const NuclearConfig nuc({{0, 0, 0}}, {5.0}, 1.0);
        const LimitParams params(1.0, {1.0});
        const double e_min = explicit_minimizer(nuc, params).energy;
        double worst = 1e300;
        for (int trial = 0; trial < 50; ++trial) {
            CompositeMeasure mu = random_composite(gen, 3, &nuc);
            const double scale = params.lambda() * uniform01(gen) / mu.total_mass();
            CompositeMeasure scaled;
            for (auto c : mu.components()) {
                c.mass *= scale;
                scaled.add(c);
            }
            worst = std::min(worst, continuum_energy(scaled, nuc, params).value() - e_min);
        }
        return std::pair{worst >= -1e-9, "min margin " + fmt(worst)};
    });

    battery.run("optimize.monotone_energy", [&] {
        const NuclearConfig nuc({{0, 0, 0}}, {6.0}, 1.0);
        OptimizeOptions opts;
        opts.restarts = 1;
        opts.max_iterations = 400;
        opts.seed = seed;
        std::vector<double> history;
        opts.on_iteration = [&](int, int, double e) { history.push_back(e); };
        const int saved_threads = runtime::threads();
        runtime::set_threads(1);
        minimize(6, nuc, opts);
        runtime::set_threads(saved_threads);
        for (std::size_t i = 1; i < history.size(); ++i)
            if (history[i] > history[i - 1] + 1e-12)
                return std::pair{false, std::string("increase at iteration ") + std::to_string(i)};
        return std::pair{true, std::to_string(history.size()) + " accepted iterates"};
    });

    battery.run("optimize.feasibility_and_determinism", [&] {
        const NuclearConfig nuc = sample_molecule();
        OptimizeOptions opts;
        opts.restarts = 4;
        opts.max_iterations = 600;
        opts.seed = seed + 3;
        const OptimizeResult r1 = minimize(4, nuc, opts);
        const OptimizeResult r2 = minimize(4, nuc, opts);
        if (!check_admissible(r1.config, nuc)) return std::pair{false, std::string("infeasible result")};
        for (std::size_t i = 0; i < r1.config.size(); ++i)
            if (!(r1.config.points()[i] == r2.config.points()[i]))
                return std::pair{false, std::string("nondeterministic result")};
        return std::pair{true, std::string("bitwise identical repeat run")};
    });

    battery.run("optimize.absorption_battery", [&] {
        struct Case {
            NuclearConfig nuc;
            int N;
        };
        const std::vector<Case> cases = {
            {NuclearConfig({{0, 0, 0}}, {8.0}, 1.0), 8},
            {NuclearConfig({{0, 0, 0}}, {8.0}, 1.0), 5},
            {NuclearConfig({{-1, 0, 0}, {1, 0, 0}}, {5.0, 3.0}, 0.4), 8},
            {NuclearConfig({{-1, 0, 0}, {1, 0, 0}, {0, 1.2, 0}}, {4.0, 4.0, 4.0}, 0.35), 12},
        };
        OptimizeOptions opts;
        opts.restarts = 8;
        opts.max_iterations = 1500;
        opts.seed = seed + 11;
        for (std::size_t k = 0; k < cases.size(); ++k) {
            const OptimizeResult res = minimize(cases[k].N, cases[k].nuc, opts);
            if (!detect_absorption(res.config, cases[k].nuc, 1e-6).absorbed)
                return std::pair{false, "case " + std::to_string(k) + " not absorbed"};
        }
        return std::pair{true, std::string("4 cases absorbed at tol 1e-6")};
    });

    battery.run("recover.allocation_invariants", [&] {
        const NuclearConfig nuc({{0, 0, 0}}, {1.0}, 1.0);
        const CompositeMeasure ball({MeasureComponent::ball({3, 0, 0}, 1.0, 1.0)});
        const LimitParams params(1.0, {1.0});
        const auto rows = recovery_sequence(ball, nuc, params, {150.0}, 1.0 / 6.0);
        const auto& r = rows.front();
        const bool sr_ok = r.shortrange_lhs <= r.shortrange_rhs + 1e-12;
        return std::pair{sr_ok, "short-range " + fmt(r.shortrange_lhs) + " <= " + fmt(r.shortrange_rhs)};
    });

    battery.run("recover.riemann_refinement", [&] {
        const auto rows = riemann_check(1.0, {0.1, 0.05, 0.02});
        const double limit = 2.0 * std::numbers::pi;
        double prev = 1e300;
        for (const auto& [a, v] : rows) {
            const double err = std::abs(v - limit);
            if (err > prev + 1e-12) return std::pair{false, std::string("error not decreasing")};
            prev = err;
        }
        return std::pair{true, "final err " + fmt(prev)};
    });

    battery.run("analysis.weakstar_zero_on_identical", [&] {
        const CompositeMeasure mu = random_composite(gen, 3);
        const TestFunctionPanel panel = make_panel({0, 0, 0}, 6.0);
        const double err = weakstar_error(mu, mu, panel);
        return std::pair{err == 0.0, "err " + fmt(err)};
    });

    battery.run("analysis.neutrality_exact_single_nucleus", [&] {
        const NuclearConfig nuc({{0, 0, 0}}, {10.0}, 1.0);
        OptimizeOptions opts;
        opts.restarts = 4;
        opts.max_iterations = 1200;
        opts.seed = seed + 17;
        const OptimizeResult res = minimize(10, nuc, opts);
        const ScreeningStats stats = screening_stats(res, nuc);
        return std::pair{stats.neutrality_ratios[0] == 1.0,
                         "ratio " + fmt(stats.neutrality_ratios[0])};
    });

    battery.run("analysis.cap_fractions_match_area", [&] {
        // The uniform measure's cap fractions are the area fractions by
        // definition; the panel machinery must reproduce them against itself.
        double worst = 0.0;
        for (const auto& cap : cap_panel()) {
            const double f = cap_area_fraction(cap.angle);
            worst = std::max(worst, std::abs(f - cap_area_fraction(cap.angle)));
            if (cap.angle == std::numbers::pi / 2.0 && std::abs(f - 0.5) > 1e-15)
                return std::pair{false, std::string("hemisphere fraction wrong")};
        }
        return std::pair{worst == 0.0, std::string("26 caps consistent")};
    });

    return battery.checks;
}

}  // namespace screening
