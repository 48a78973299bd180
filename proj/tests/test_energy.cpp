#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "screening/continuum.hpp"
#include "screening/core.hpp"
#include "screening/energy.hpp"
#include "screening/random.hpp"
#include "screening/verify.hpp"

using namespace screening;

TEST_CASE("external potential values") {
    const NuclearConfig z3({{0, 0, 0}}, {3.0}, 1.0);
    CHECK(external_potential({0, 0, 1.5}, z3) == doctest::Approx(-2.0));

    const NuclearConfig pair({{1, 0, 0}, {-1, 0, 0}}, {1.0, 1.0}, 0.4);
    CHECK(external_potential({0, 0, 0}, pair) == doctest::Approx(-2.0));

    const NuclearConfig z5({{0, 0, 0}}, {5.0}, 1.0);
    CHECK(external_potential({1e6, 0, 0}, z5) == doctest::Approx(-5e-6));

    CHECK_THROWS_AS(external_potential({0, 0, 0}, z3), std::domain_error);
}

TEST_CASE("particle energy decomposition") {
    const NuclearConfig nuc({{0, 0, 0}}, {2.0}, 1.0);
    const EnergyBreakdown e = particle_energy(ElectronConfig({{1, 0, 0}, {-1, 0, 0}}), nuc);
    CHECK(e.attraction == doctest::Approx(-4.0));
    CHECK(e.repulsion == doctest::Approx(0.5));
    CHECK(e.total == doctest::Approx(-3.5));
    CHECK(e.nuclear_repulsion == 0.0);

    SUBCASE("single electron has no pair term") {
        const EnergyBreakdown one = particle_energy(ElectronConfig({{0, 2, 0}}), nuc);
        CHECK(one.repulsion == 0.0);
        CHECK(one.total == doctest::Approx(-1.0));
    }
    SUBCASE("equilateral triangle on the unit sphere") {
        const NuclearConfig z3({{0, 0, 0}}, {3.0}, 1.0);
        std::vector<Vec3> tri;
        for (int k = 0; k < 3; ++k) {
            const double ang = 2.0 * M_PI * k / 3.0;
            tri.push_back({std::cos(ang), std::sin(ang), 0.0});
        }
        const EnergyBreakdown t = particle_energy(ElectronConfig(tri), z3);
        CHECK(t.total == doctest::Approx(-9.0 + std::sqrt(3.0)).epsilon(1e-12));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(particle_energy(ElectronConfig({{1, 0, 0}, {1, 0, 0}}), nuc),
                        std::domain_error);
        CHECK_THROWS_AS(particle_energy(ElectronConfig({{0, 0, 0}}), nuc), std::domain_error);
    }
    SUBCASE("nuclear repulsion for molecules") {
        const NuclearConfig mol({{-1, 0, 0}, {1, 0, 0}}, {2.0, 3.0}, 0.4);
        CHECK(particle_energy(ElectronConfig({{0, 1, 0}}), mol).nuclear_repulsion ==
              doctest::Approx(3.0));
    }
}

TEST_CASE("analytic gradient") {
    SUBCASE("single electron in a single-nucleus field") {
        const NuclearConfig nuc({{0, 0, 0}}, {1.0}, 1.0);
        const auto g = particle_gradient(ElectronConfig({{2, 0, 0}}), nuc);
        CHECK(g[0].x == doctest::Approx(0.25));
        CHECK(g[0].y == doctest::Approx(0.0));
    }
    SUBCASE("antipodal pair gradients are equal, opposite and radial") {
        const NuclearConfig nuc({{0, 0, 0}}, {2.0}, 1.0);
        const auto g = particle_gradient(ElectronConfig({{1, 0, 0}, {-1, 0, 0}}), nuc);
        CHECK(g[0].x == doctest::Approx(-g[1].x));
        CHECK(g[0].y == doctest::Approx(0.0));
        CHECK(g[0].z == doctest::Approx(0.0));
    }
    SUBCASE("matches central finite differences") {
        const NuclearConfig mol({{-1, 0, 0}, {1, 0.3, 0}}, {2.0, 2.0}, 0.4);
        std::mt19937_64 gen(11);
        for (int trial = 0; trial < 10; ++trial) {
            ElectronConfig cfg = random_admissible_config(gen, 4, mol, 0.8);
            const auto grad = particle_gradient(cfg, mol);
            const double h = 1e-5;
            for (std::size_t i = 0; i < cfg.size(); ++i) {
                for (int ax = 0; ax < 3; ++ax) {
                    ElectronConfig plus = cfg, minus = cfg;
                    double& pp = ax == 0 ? plus.points()[i].x
                                 : ax == 1 ? plus.points()[i].y
                                           : plus.points()[i].z;
                    double& pm = ax == 0 ? minus.points()[i].x
                                 : ax == 1 ? minus.points()[i].y
                                           : minus.points()[i].z;
                    pp += h;
                    pm -= h;
                    const double fd = (particle_energy(plus, mol).total -
                                       particle_energy(minus, mol).total) /
                                      (2.0 * h);
                    const double an =
                        ax == 0 ? grad[i].x : ax == 1 ? grad[i].y : grad[i].z;
                    CHECK(std::abs(fd - an) <= 1e-6);
                }
            }
        }
    }
}

TEST_CASE("empirical energy and the Z^2 identity") {
    const NuclearConfig nuc({{0, 0, 0}}, {2.0}, 1.0);
    const ElectronConfig cfg({{1, 0, 0}, {-1, 0, 0}});

    const ExtReal val = empirical_energy(to_empirical(cfg, 2.0), nuc, {1.0});
    REQUIRE(val.is_finite());
    CHECK(val.value() == doctest::Approx(-0.875).epsilon(1e-13));

    SUBCASE("point inside a hard core gives +infinity") {
        const EmpiricalMeasure inside({{0.5, 0, 0}, {2, 0, 0}}, 0.5);
        CHECK(empirical_energy(inside, nuc, {1.0}).is_infinite());
    }
    SUBCASE("duplicate points give +infinity, not an error") {
        const EmpiricalMeasure dup({{1, 0, 0}, {1, 0, 0}}, 0.5);
        CHECK(empirical_energy(dup, nuc, {1.0}).is_infinite());
    }
    SUBCASE("identity holds for random admissible configs") {
        const NuclearConfig mol({{-1, 0, 0}, {1, 0, 0}}, {3.0, 2.0}, 0.4);
        std::mt19937_64 gen(13);
        for (int trial = 0; trial < 10; ++trial) {
            const ElectronConfig rnd = random_admissible_config(gen, 6, mol);
            const double Z = mol.total_charge();
            const double lhs =
                empirical_energy(to_empirical(rnd, Z), mol, mol.charge_fractions()).value();
            const double rhs = particle_energy(rnd, mol).total / (Z * Z);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("truncated kernel energies") {
    CHECK(truncated_kernel(0.5, 1.0) == 1.0);   // two unit masses at distance alpha/2
    CHECK(truncated_kernel(2.0, 1.0) == 0.5);
    CHECK(truncated_kernel(1.0, 1.0) == 1.0);

    const NuclearConfig nuc({{0, 0, 0}}, {1.0}, 1.0);

    SUBCASE("monotone in alpha on empirical measures") {
        std::mt19937_64 gen(17);
        const ElectronConfig cfg = random_admissible_config(gen, 8, nuc);
        const EmpiricalMeasure mu = to_empirical(cfg, 8.0);
        double prev = -1e300;
        for (double alpha : {2.0, 1.0, 0.5, 0.25, 0.1}) {
            const double v = truncated_energy(mu, nuc, {1.0}, alpha);  // alpha decreasing
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
    SUBCASE("ball measure: truncated energy converges to the exact energy") {
        const CompositeMeasure ball({MeasureComponent::ball({3, 0, 0}, 1.0, 1.0)});
        const LimitParams params(1.0, {1.0});
        const double exact = continuum_energy(ball, nuc, params).value();
        const double trunc = truncated_energy(ball, nuc, {1.0}, 0.01);  // alpha = radius/100
        CHECK(std::abs(trunc - exact) / std::abs(exact) <= 0.01);
        // truncation only weakens the kernel
        CHECK(trunc <= exact + 1e-12);
        // independent oracle: Monte Carlo estimate of the truncated pair term
        std::mt19937_64 gen(23);
        auto sample_ball = [&](double radius, const Vec3& c) {
            for (;;) {
                const Vec3 p{2.0 * uniform01(gen) - 1.0, 2.0 * uniform01(gen) - 1.0,
                             2.0 * uniform01(gen) - 1.0};
                if (p.norm2() <= 1.0) return c + p * radius;
            }
        };
        const double alpha = 0.25;
        KahanSum mc;
        const int samples = 400000;
        for (int s = 0; s < samples; ++s)
            mc.add(truncated_kernel(
                distance(sample_ball(1.0, {3, 0, 0}), sample_ball(1.0, {3, 0, 0})), alpha));
        const double pair_mc = 0.5 * mc.value() / samples;  // (1/2) E[f_alpha]
        const double attraction = -1.0 / 3.0;
        const double lib = truncated_energy(ball, nuc, {1.0}, alpha);
        CHECK(lib == doctest::Approx(attraction + pair_mc).epsilon(0.01));
    }
}

TEST_CASE("deterministic pair sum matches serial Kahan accumulation") {
    std::mt19937_64 gen(29);
    std::vector<Vec3> pts;
    for (int i = 0; i < 700; ++i) pts.push_back(random_unit_vector(gen) * (1.0 + uniform01(gen)));
    auto kernel = [&](std::size_t i, std::size_t j) { return 1.0 / distance(pts[i], pts[j]); };
    KahanSum serial;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) serial.add(kernel(i, j));
    const double chunked = deterministic_pair_sum(pts.size(), kernel);
    CHECK(chunked == doctest::Approx(serial.value()).epsilon(1e-12));

    const int saved = runtime::threads();
    runtime::set_threads(1);
    const double serial_run = deterministic_pair_sum(pts.size(), kernel);
    runtime::set_threads(4);
    const double parallel_run = deterministic_pair_sum(pts.size(), kernel);
    runtime::set_threads(saved);
    CHECK(serial_run == parallel_run);  // bitwise: chunk layout is thread-independent
}

TEST_CASE("energy is harmonic in each electron coordinate away from sources") {
    const NuclearConfig mol({{-1, 0, 0}, {1, 0.2, 0}}, {2.0, 1.0}, 0.4);
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 5; ++trial) {
        const ElectronConfig cfg = random_admissible_config(gen, 5, mol, 1.0);
        const double h = 1e-4;
        const double f0 = particle_energy(cfg, mol).total;
        double lap = 0.0;
        for (int ax = 0; ax < 3; ++ax) {
            for (double s : {1.0, -1.0}) {
                ElectronConfig shifted = cfg;
                (ax == 0   ? shifted.points()[0].x
                 : ax == 1 ? shifted.points()[0].y
                           : shifted.points()[0].z) += s * h;
                lap += particle_energy(shifted, mol).total;
            }
        }
        CHECK(std::abs((lap - 6.0 * f0) / (h * h)) <= 1e-3);
    }
}
