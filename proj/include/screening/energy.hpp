#pragma once

#include <vector>

#include "screening/core.hpp"
#include "screening/numeric.hpp"

namespace screening {

/// Decomposition of the N-electron energy: attraction = sum of the external
/// potential over electrons, repulsion = electron-electron pair sum, total =
/// their sum, plus the nucleus-nucleus repulsion (zero for a single
/// nucleus), which is not part of total.
struct EnergyBreakdown {
    double attraction = 0.0;
    double repulsion = 0.0;
    double total = 0.0;
    double nuclear_repulsion = 0.0;
};

/// External molecular potential v(x) = sum_alpha -Z_alpha / |x - R_alpha|.
/// Throws std::domain_error if x coincides with a nucleus.
double external_potential(const Vec3& x, const NuclearConfig& nuc);

/// Full energy of an electron configuration. Pair sums run in a fixed
/// deterministic order with compensated accumulation; large N uses a
/// fixed-chunk parallel reduction that is bitwise independent of the thread
/// count. Throws std::domain_error on coincident electrons or an electron at
/// a nucleus.
EnergyBreakdown particle_energy(const ElectronConfig& cfg, const NuclearConfig& nuc);

/// Analytic gradient of the total energy with respect to each electron.
std::vector<Vec3> particle_gradient(const ElectronConfig& cfg, const NuclearConfig& nuc);

/// Energy functional on empirical measures: the per-particle energy divided
/// by Z^2 when mu is a sum of distinct atoms of mass 1/Z outside the hard
/// cores, +infinity otherwise. z_fractions are the charge fractions
/// Z_alpha/Z.
ExtReal empirical_energy(const EmpiricalMeasure& mu, const NuclearConfig& nuc,
                         const std::vector<double>& z_fractions);

/// Truncated pair kernel min(1/r, 1/alpha).
double truncated_kernel(double r, double alpha);

/// Energy with the pair integrand replaced by the truncated kernel on the
/// full product domain (diagonal included); the attraction term is
/// unchanged. Defined for both empirical and composite measures.
double truncated_energy(const EmpiricalMeasure& mu, const NuclearConfig& nuc,
                        const std::vector<double>& z_fractions, double alpha);
double truncated_energy(const CompositeMeasure& mu, const NuclearConfig& nuc,
                        const std::vector<double>& z_fractions, double alpha);

/// Deterministic pair sum of k(i, j) over 0 <= i < j < n. Serial Kahan
/// accumulation per fixed chunk; chunk partials combined in index order, so
/// the value does not depend on the number of worker threads.
double deterministic_pair_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& k);

}  // namespace screening
