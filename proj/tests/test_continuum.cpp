#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "screening/continuum.hpp"
#include "screening/core.hpp"
#include "screening/random.hpp"
#include "screening/verify.hpp"

using namespace screening;

namespace {

CompositeMeasure scaled_to_mass(const CompositeMeasure& mu, double mass) {
    const double s = mass / mu.total_mass();
    CompositeMeasure out;
    for (auto c : mu.components()) {
        c.mass *= s;
        out.add(c);
    }
    return out;
}

}  // namespace

TEST_CASE("shell potential follows the classical shell rule") {
    const MeasureComponent shell = MeasureComponent::shell({0, 0, 0}, 1.0, 1.0);
    CHECK(shell_potential(shell, {3, 0, 0}) == doctest::Approx(1.0 / 3.0));
    CHECK(shell_potential(shell, {0.5, 0, 0}) == doctest::Approx(1.0));
    CHECK(shell_potential(shell, {1, 0, 0}) == doctest::Approx(1.0));  // continuous at the shell
    CHECK_THROWS_AS(shell_potential(MeasureComponent::ball({0, 0, 0}, 1, 1), {2, 0, 0}),
                    std::invalid_argument);
}

TEST_CASE("continuum energy closed forms") {
    const NuclearConfig atom({{0, 0, 0}}, {1.0}, 1.0);
    const LimitParams unit(1.0, {1.0});

    SUBCASE("saturated shell at a single nucleus") {
        const CompositeMeasure shell({MeasureComponent::shell({0, 0, 0}, 1.0, 1.0)});
        CHECK(continuum_energy(shell, atom, unit).value() == doctest::Approx(-0.5).epsilon(1e-14));
    }
    SUBCASE("two-center shells at neutral filling") {
        const NuclearConfig mol({{-1, 0, 0}, {1, 0, 0}}, {1.0, 1.0}, 0.4);
        const LimitParams params(1.0, {0.5, 0.5});
        const CompositeMeasure shells({MeasureComponent::shell({-1, 0, 0}, 0.4, 0.5),
                                       MeasureComponent::shell({1, 0, 0}, 0.4, 0.5)});
        CHECK(continuum_energy(shells, mol, params).value() ==
              doctest::Approx(-0.75).epsilon(1e-14));
    }
    SUBCASE("zero measure has zero energy") {
        CHECK(continuum_energy(CompositeMeasure{}, atom, unit).value() == 0.0);
    }
    SUBCASE("mass above lambda is +infinity") {
        const CompositeMeasure heavy({MeasureComponent::shell({0, 0, 0}, 1.0, 1.5)});
        CHECK(continuum_energy(heavy, atom, unit).is_infinite());
    }
    SUBCASE("positive point atoms are +infinity") {
        const CompositeMeasure pt({MeasureComponent::point({2, 0, 0}, 0.5)});
        CHECK(continuum_energy(pt, atom, unit).is_infinite());
    }
    SUBCASE("support inside a hard core is a domain error") {
        const CompositeMeasure bad({MeasureComponent::ball({1.2, 0, 0}, 0.5, 0.5)});
        CHECK_THROWS_AS(continuum_energy(bad, atom, unit), std::domain_error);
    }
}

TEST_CASE("coulomb norm closed forms and oracles") {
    const CompositeMeasure s1({MeasureComponent::shell({0, 0, 0}, 1.0, 1.0)});
    const CompositeMeasure s2({MeasureComponent::shell({0, 0, 0}, 2.0, 1.0)});
    const CompositeMeasure b1({MeasureComponent::ball({0, 0, 0}, 1.0, 1.0)});

    CHECK(std::abs(coulomb_norm(s1, s1)) <= 1e-12);
    CHECK(coulomb_norm(s1, s2) == doctest::Approx(0.25).epsilon(1e-13));
    // shell self m^2/(2a) = 0.5, ball self 3 m^2/(5a) = 0.6, cross = 1
    CHECK(coulomb_norm(s1, b1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS_AS(coulomb_norm(CompositeMeasure({MeasureComponent::point({0, 0, 0}, 1.0)}), s1),
                    std::domain_error);

    SUBCASE("ball self-energy against a Monte Carlo quadrature oracle") {
        std::mt19937_64 gen(37);
        auto sample_ball = [&] {
            for (;;) {
                const Vec3 p{2.0 * uniform01(gen) - 1.0, 2.0 * uniform01(gen) - 1.0,
                             2.0 * uniform01(gen) - 1.0};
                if (p.norm2() <= 1.0) return p;
            }
        };
        KahanSum mc;
        const int samples = 500000;
        for (int s = 0; s < samples; ++s) mc.add(1.0 / distance(sample_ball(), sample_ball()));
        const double J_mc = 0.5 * mc.value() / samples;
        CHECK(coulomb_self_energy(b1) == doctest::Approx(J_mc).epsilon(0.01));
    }
    SUBCASE("offset shell-ball cross term against a Monte Carlo oracle") {
        const MeasureComponent shell = MeasureComponent::shell({0, 0, 0}, 1.0, 1.0);
        const MeasureComponent ball = MeasureComponent::ball({0.5, 0.2, 0}, 0.7, 1.0);
        std::mt19937_64 gen(41);
        KahanSum mc;
        const int samples = 500000;
        for (int s = 0; s < samples; ++s) {
            Vec3 p;
            for (;;) {
                p = {2.0 * uniform01(gen) - 1.0, 2.0 * uniform01(gen) - 1.0,
                     2.0 * uniform01(gen) - 1.0};
                if (p.norm2() <= 1.0) break;
            }
            const Vec3 x = ball.center + p * ball.radius;
            mc.add(std::min(1.0 / x.norm(), 1.0));  // shell potential of radius 1
        }
        const double cross_mc = mc.value() / samples;
        CHECK(component_interaction(shell, ball).value() ==
              doctest::Approx(cross_mc).epsilon(0.01));
    }
    SUBCASE("positivity on random equal-mass pairs") {
        std::mt19937_64 gen(43);
        for (int trial = 0; trial < 40; ++trial) {
            const CompositeMeasure mu1 = random_composite(gen, 3);
            const CompositeMeasure mu2 = scaled_to_mass(random_composite(gen, 3), mu1.total_mass());
            CHECK(coulomb_norm(mu1, mu2) >= -1e-9);
        }
    }
}

TEST_CASE("fourier representation of the coulomb norm") {
    const CompositeMeasure s1({MeasureComponent::shell({0, 0, 0}, 1.0, 1.0)});
    const CompositeMeasure s2({MeasureComponent::shell({0, 0, 0}, 2.0, 1.0)});

    CHECK(fourier_energy(s1, s2).value() == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(std::abs(fourier_energy(s1, s1).value()) <= 1e-9);

    SUBCASE("shell form factor vanishes at a k = pi") {
        const RadialFormFactor ff{ComponentKind::Shell, 1.0, 1.0};
        CHECK(std::abs(ff.evaluate(std::numbers::pi)) <= 1e-12);
        CHECK(ff.evaluate(0.0) == 1.0);
        for (double k : {0.3, 1.7, 4.0}) CHECK(std::abs(ff.evaluate(k)) <= 1.0);
    }
    SUBCASE("unequal total masses are flagged as +infinity") {
        const CompositeMeasure heavy({MeasureComponent::shell({0, 0, 0}, 2.0, 1.5)});
        CHECK(fourier_energy(s1, heavy).is_infinite());
    }
    SUBCASE("two-center disjoint pair") {
        const CompositeMeasure far({MeasureComponent::shell({3, 0.5, 0}, 1.0, 1.0)});
        const double closed = coulomb_norm(s1, far);
        CHECK(fourier_energy(s1, far).value() == doctest::Approx(closed).epsilon(1e-3));
    }
}

TEST_CASE("mollified energies") {
    const CompositeMeasure s1({MeasureComponent::shell({0, 0, 0}, 1.0, 1.0)});
    const CompositeMeasure s2({MeasureComponent::shell({0, 0, 0}, 2.0, 1.0)});

    CHECK(mollified_energy(s1, s2, 0.0).value() ==
          doctest::Approx(fourier_energy(s1, s2).value()).epsilon(1e-12));

    SUBCASE("nondecreasing as eps decreases, toward the coulomb norm") {
        double prev = -1e300;
        for (double eps : {1.0, 0.1, 0.01}) {
            const double v = mollified_energy(s1, s2, eps).value();
            CHECK(v >= prev - 1e-9);
            prev = v;
        }
        CHECK(prev <= 0.25 + 1e-6);
        // Gaussian mollification removes (5/8) sqrt(eps/pi) from this pair.
        const double v001 = mollified_energy(s1, s2, 0.001).value();
        const double predicted = 0.25 - 0.625 * std::sqrt(0.001 / std::numbers::pi);
        CHECK(v001 == doctest::Approx(predicted).epsilon(1e-3));
    }
    SUBCASE("large eps suppresses equal-mass differences") {
        CHECK(std::abs(mollified_energy(s1, s2, 1e6).value()) <= 1e-4);
    }
    CHECK_THROWS_AS(mollified_energy(s1, s2, -1.0), std::invalid_argument);
}

TEST_CASE("explicit minimizer") {
    SUBCASE("neutral atom") {
        const NuclearConfig atom({{0, 0, 0}}, {1.0}, 1.0);
        const MinimizerResult r = explicit_minimizer(atom, LimitParams(1.0, {1.0}));
        CHECK(r.energy == doctest::Approx(-0.5));
        CHECK(r.saturated_mass == 1.0);
        REQUIRE(r.measure.size() == 1);
        CHECK(r.measure.components()[0].kind == ComponentKind::Shell);
        CHECK(r.measure.components()[0].radius == 1.0);
    }
    SUBCASE("positive atomic ion") {
        const NuclearConfig atom({{0, 0, 0}}, {1.0}, 1.0);
        const MinimizerResult r = explicit_minimizer(atom, LimitParams(0.3, {1.0}));
        CHECK(r.energy == doctest::Approx(-0.255));
        CHECK(r.saturated_mass == doctest::Approx(0.3));
    }
    SUBCASE("saturation above neutrality") {
        const NuclearConfig atom({{0, 0, 0}}, {1.0}, 1.0);
        const MinimizerResult r1 = explicit_minimizer(atom, LimitParams(1.0, {1.0}));
        const MinimizerResult r2 = explicit_minimizer(atom, LimitParams(2.0, {1.0}));
        CHECK(r1.energy == r2.energy);
        CHECK(r2.saturated_mass == 1.0);
        CHECK(r2.measure.total_mass() == r1.measure.total_mass());
    }
    SUBCASE("molecular positive ions are declined") {
        const NuclearConfig mol({{-1, 0, 0}, {1, 0, 0}}, {1.0, 1.0}, 0.4);
        CHECK_THROWS_AS(explicit_minimizer(mol, LimitParams(0.5, {0.5, 0.5})),
                        std::invalid_argument);
    }
    SUBCASE("molecule matches the shell formula") {
        const NuclearConfig mol({{-1, 0, 0}, {1, 0, 0}}, {1.0, 1.0}, 0.4);
        const MinimizerResult r = explicit_minimizer(mol, LimitParams(1.0, {0.5, 0.5}));
        CHECK(r.energy == doctest::Approx(-0.75));
        CHECK(r.measure.size() == 2);
    }
}

TEST_CASE("radial reduction") {
    SUBCASE("values") {
        CHECK(radial_energy(RadialMeasure({1.0}, {0.5}), 1.0) == doctest::Approx(-0.375));
        CHECK(radial_energy(RadialMeasure({2.0}, {1.0}), 1.0) == doctest::Approx(-0.25));
        CHECK(radial_energy(RadialMeasure{}, 1.0) == 0.0);
    }
    SUBCASE("grid minimization concentrates at r = 1") {
        const std::vector<double> grid{1.0, 1.5, 2.0, 3.0, 5.0};
        const RadialMeasure nu = radial_minimize(1.0, 0.5, grid);
        double off = 0.0, at1 = 0.0;
        for (std::size_t i = 0; i < nu.size(); ++i)
            (nu.radii()[i] == 1.0 ? at1 : off) += nu.masses()[i];
        CHECK(at1 == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(off < 1e-6);
        CHECK(radial_energy(nu, 1.0) == doctest::Approx(-0.375).epsilon(1e-8));
    }
    SUBCASE("mass saturates at z") {
        const RadialMeasure nu = radial_minimize(1.0, 2.0, {1.0, 1.5, 2.0, 3.0, 5.0});
        CHECK(nu.total_mass() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(radial_energy(nu, 1.0) == doctest::Approx(-0.5).epsilon(1e-8));
    }
    SUBCASE("z = 0 gives the zero measure") {
        const RadialMeasure nu = radial_minimize(0.0, 1.0, {1.0, 2.0});
        CHECK(std::abs(nu.total_mass()) <= 1e-10);
    }
    CHECK_THROWS_AS(radial_minimize(1.0, 1.0, {1.5, 2.0}), std::invalid_argument);
}

TEST_CASE("rotation averaging") {
    const NuclearConfig atom({{0, 0, 0}}, {1.0}, 1.0);
    const LimitParams params(1.0, {1.0});

    SUBCASE("concentric components are fixed points") {
        const CompositeMeasure shell({MeasureComponent::shell({0, 0, 0}, 2.0, 0.5)});
        const CompositeMeasure avg = rotation_average(shell, {0, 0, 0}, 64);
        REQUIRE(avg.size() == 1);
        CHECK(avg.components()[0].mass == 0.5);
    }
    SUBCASE("zero-mass off-center atoms vanish") {
        CompositeMeasure mu;
        mu.add(MeasureComponent::point({1, 0, 0}, 0.0));
        const CompositeMeasure avg = rotation_average(mu, {0, 0, 0}, 16);
        CHECK(avg.size() == 0);
    }
    SUBCASE("averaging an off-center ball does not increase the energy") {
        const CompositeMeasure ball({MeasureComponent::ball({3, 0, 0}, 0.5, 0.8)});
        const double before = continuum_energy(ball, atom, params).value();
        const CompositeMeasure avg = rotation_average(ball, {0, 0, 0}, 256);
        CHECK(avg.size() == 256);
        CHECK(avg.total_mass() == doctest::Approx(0.8).epsilon(1e-12));
        const double after = continuum_energy(avg, atom, params).value();
        CHECK(after <= before + 1e-9);
    }
    CHECK_THROWS_AS(rotation_average(CompositeMeasure{}, {0, 0, 0}, 0), std::invalid_argument);
}

TEST_CASE("convexity and completing-the-square identities") {
    const NuclearConfig mol({{-1, 0, 0}, {1, 0.2, 0}}, {3.0, 2.0}, 0.4);
    const LimitParams big = LimitParams::unnormalized(1e9, mol.charge_fractions());
    std::mt19937_64 gen(47);

    SUBCASE("midpoint identity") {
        for (int trial = 0; trial < 10; ++trial) {
            const CompositeMeasure mu1 = random_composite(gen, 3, &mol);
            const CompositeMeasure mu2 = random_composite(gen, 3, &mol);
            CompositeMeasure mid;
            for (auto c : mu1.components()) {
                c.mass *= 0.5;
                mid.add(c);
            }
            for (auto c : mu2.components()) {
                c.mass *= 0.5;
                mid.add(c);
            }
            const double lhs = 0.5 * (continuum_energy(mu1, mol, big).value() +
                                      continuum_energy(mu2, mol, big).value()) -
                               continuum_energy(mid, mol, big).value();
            CHECK(std::abs(lhs - 0.25 * coulomb_norm(mu1, mu2)) <= 1e-9);
        }
    }
    SUBCASE("energy equals the squared distance to the nuclear shells") {
        CompositeMeasure rho;
        for (std::size_t a = 0; a < mol.size(); ++a)
            rho.add(MeasureComponent::shell(mol.positions()[a], mol.hardcore_radius(),
                                            mol.charge_fractions()[a]));
        const double J_rho = coulomb_self_energy(rho);
        for (int trial = 0; trial < 10; ++trial) {
            const CompositeMeasure mu = random_composite(gen, 3, &mol);
            const double lhs = continuum_energy(mu, mol, big).value();
            const double rhs = coulomb_norm(rho, mu) - J_rho;
            CHECK(std::abs(lhs - rhs) <= 1e-9);
        }
    }
}
