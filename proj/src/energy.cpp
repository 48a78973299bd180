#include "screening/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "screening/continuum.hpp"

namespace screening {

double external_potential(const Vec3& x, const NuclearConfig& nuc) {
    KahanSum v;
    for (std::size_t a = 0; a < nuc.size(); ++a) {
        const double r = distance(x, nuc.positions()[a]);
        if (r == 0.0) throw std::domain_error("external_potential: point coincides with a nucleus");
        v.add(-nuc.charges()[a] / r);
    }
    return v.value();
}

double deterministic_pair_sum(std::size_t n,
                              const std::function<double(std::size_t, std::size_t)>& k) {
    if (n < 2) return 0.0;
    // Chunk count depends only on n, never on the thread count.
    const std::size_t chunks = n >= 512 ? 64 : 1;
    std::vector<double> partial(chunks, 0.0);
    runtime::parallel_for(chunks, [&](std::size_t c) {
        KahanSum acc;
        for (std::size_t i = c; i + 1 < n; i += chunks)
            for (std::size_t j = i + 1; j < n; ++j) acc.add(k(i, j));
        partial[c] = acc.value();
    });
    KahanSum total;
    for (double p : partial) total.add(p);
    return total.value();
}

EnergyBreakdown particle_energy(const ElectronConfig& cfg, const NuclearConfig& nuc) {
    const auto& x = cfg.points();
    EnergyBreakdown out;

    KahanSum attraction;
    for (const auto& p : x) attraction.add(external_potential(p, nuc));
    out.attraction = attraction.value();

    out.repulsion = deterministic_pair_sum(x.size(), [&](std::size_t i, std::size_t j) {
        const double r = distance(x[i], x[j]);
        if (r == 0.0) throw std::domain_error("particle_energy: coincident electrons (infinite energy)");
        return 1.0 / r;
    });
    out.total = out.attraction + out.repulsion;

    KahanSum vnuc;
    for (std::size_t a = 0; a + 1 < nuc.size(); ++a)
        for (std::size_t b = a + 1; b < nuc.size(); ++b)
            vnuc.add(nuc.charges()[a] * nuc.charges()[b] /
                     distance(nuc.positions()[a], nuc.positions()[b]));
    out.nuclear_repulsion = vnuc.value();
    return out;
}

std::vector<Vec3> particle_gradient(const ElectronConfig& cfg, const NuclearConfig& nuc) {
    const auto& x = cfg.points();
    std::vector<Vec3> grad(x.size());
    runtime::parallel_for(x.size(), [&](std::size_t i) {
        Vec3 g{0.0, 0.0, 0.0};
        for (std::size_t a = 0; a < nuc.size(); ++a) {
            const Vec3 dr = x[i] - nuc.positions()[a];
            const double r = dr.norm();
            if (r == 0.0) throw std::domain_error("particle_gradient: electron at a nucleus");
            g += dr * (nuc.charges()[a] / (r * r * r));
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j == i) continue;
            const Vec3 dr = x[i] - x[j];
            const double r = dr.norm();
            if (r == 0.0) throw std::domain_error("particle_gradient: coincident electrons");
            g -= dr / (r * r * r);
        }
        grad[i] = g;
    });
    return grad;
}

ExtReal empirical_energy(const EmpiricalMeasure& mu, const NuclearConfig& nuc,
                         const std::vector<double>& z_fractions) {
    if (z_fractions.size() != nuc.size())
        throw std::invalid_argument("empirical_energy: one charge fraction per nucleus required");
    const auto& x = mu.points();
    const double w = mu.weight();

    // The functional is finite only on sums of distinct unit atoms supported
    // outside the open hard cores.
    for (const auto& p : x)
        if (!nuc.outside_cores(p)) return ExtReal::infinity();
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (x[i] == x[j]) return ExtReal::infinity();

    // Same summation order as particle_energy so the Z^2 identity holds.
    KahanSum attraction;
    for (const auto& p : x) {
        KahanSum v;
        for (std::size_t a = 0; a < nuc.size(); ++a)
            v.add(-z_fractions[a] / distance(p, nuc.positions()[a]));
        attraction.add(v.value());
    }
    const double pair = deterministic_pair_sum(
        x.size(), [&](std::size_t i, std::size_t j) { return 1.0 / distance(x[i], x[j]); });
    return ExtReal(attraction.value() * w + pair * w * w);
}

double truncated_kernel(double r, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("truncated_kernel: alpha must be positive");
    return r >= alpha ? 1.0 / r : 1.0 / alpha;
}

double truncated_energy(const EmpiricalMeasure& mu, const NuclearConfig& nuc,
                        const std::vector<double>& z_fractions, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("truncated_energy: alpha must be positive");
    const auto& x = mu.points();
    const double w = mu.weight();
    KahanSum attraction;
    for (const auto& p : x) {
        KahanSum v;
        for (std::size_t a = 0; a < nuc.size(); ++a)
            v.add(-z_fractions[a] / distance(p, nuc.positions()[a]));
        attraction.add(v.value());
    }
    double pair = deterministic_pair_sum(x.size(), [&](std::size_t i, std::size_t j) {
        return truncated_kernel(distance(x[i], x[j]), alpha);
    });
    // Diagonal: each atom pairs with itself at kernel value 1/alpha.
    pair += 0.5 * static_cast<double>(x.size()) / alpha;
    return attraction.value() * w + pair * w * w;
}

double truncated_energy(const CompositeMeasure& mu, const NuclearConfig& nuc,
                        const std::vector<double>& z_fractions, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("truncated_energy: alpha must be positive");
    if (z_fractions.size() != nuc.size())
        throw std::invalid_argument("truncated_energy: one charge fraction per nucleus required");
    KahanSum attraction;
    for (const auto& c : mu.components())
        for (std::size_t a = 0; a < nuc.size(); ++a)
            attraction.add(-z_fractions[a] * component_potential(c, nuc.positions()[a]));
    KahanSum pair;
    const auto& comps = mu.components();
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t j = 0; j < comps.size(); ++j)
            pair.add(component_interaction_truncated(comps[i], comps[j], alpha));
    return attraction.value() + 0.5 * pair.value();
}

}  // namespace screening
