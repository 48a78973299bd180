#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "screening/analysis.hpp"
#include "screening/core.hpp"

namespace screening {

/// Half-open axis-aligned mesh of cubes of side h = parent_size / n on a
/// global grid; the union of cells covers the target support and every cell
/// avoids the hard cores. Cell order is a deterministic hash order of the
/// integer grid coordinates, which decorrelates index-based tie-breaking in
/// the mass allocation from spatial position.
struct Mesh {
    double cell_size = 0.0;    // h
    double parent_size = 0.0;  // h0
    int subdivision = 1;       // n, h = h0 / n
    std::vector<Vec3> cell_centers;
    std::vector<std::array<std::int64_t, 3>> cell_coords;  // global coords at pitch h

    std::size_t size() const { return cell_centers.size(); }
    Vec3 low_corner(std::size_t i) const {
        const double half = 0.5 * cell_size;
        return cell_centers[i] - Vec3{half, half, half};
    }
};

/// Per-cell particle counts L_i with the amplitude factor phi = (N/Z) /
/// mass(mu); satisfies sum L_i = N, L_i = 0 on empty cells and
/// (L_i - 1)/Z <= phi mu(Q_i) <= (L_i + 1)/Z.
struct Allocation {
    std::vector<std::int64_t> per_cell_counts;
    double amplitude = 1.0;
    std::vector<double> cell_masses;  // mu(Q_i), used by the invariant checks
};

/// Radially symmetric density with bounded Lebesgue mass: a uniform ball
/// (r_inner = 0) or a uniform annulus. Shell targets are thickened to
/// annuli of width 0.05 d before recovery.
struct RadialTarget {
    Vec3 center;
    double r_inner = 0.0;
    double r_outer = 1.0;
    double mass = 0.0;

    double volume() const;
    double density() const { return mass / volume(); }
};

/// One row of the recovery diagnostics (CSV columns are the first eight
/// fields; the rest feed the invariant checks).
struct RecoveryRow {
    double Z = 0.0;
    std::int64_t N = 0;
    double h = 0.0;
    double a = 0.0;
    double I_NZ = 0.0;
    double I_target = 0.0;
    double energy_gap = 0.0;  // I_NZ - I_target
    double weakstar_err = 0.0;
    std::int64_t L_plus = 0;
    double shortrange_lhs = 0.0;
    double shortrange_rhs = 0.0;
};

/// Mesh over the support of a composite measure: parent cubes of side h0 on
/// the global grid intersecting the support, each split into n^3 subcells.
/// Throws std::domain_error when the support touches the closed hard cores
/// and std::runtime_error when h0 is too large to separate the covering
/// cubes from them.
Mesh build_mesh(const CompositeMeasure& mu, const NuclearConfig& nuc, double h0, int n);
Mesh build_mesh(const std::vector<RadialTarget>& targets, const NuclearConfig& nuc, double h0,
                int n);

/// Mass of mu inside each mesh cell, normalized so the cell masses of each
/// component sum exactly to its mass.
std::vector<double> cell_masses(const std::vector<RadialTarget>& targets, const Mesh& mesh);

/// Thickens shell components into annuli of width 0.05 d; balls pass
/// through; point atoms have no bounded density and are rejected.
std::vector<RadialTarget> recovery_targets(const CompositeMeasure& mu, const NuclearConfig& nuc);

/// Integer counts from cell masses: floors of Z phi mu(Q_i), with the
/// remainder going to the nonzero-mass cells of largest fractional remainder
/// (lowest cell index wins ties).
Allocation allocate_from_masses(const std::vector<double>& masses, std::int64_t N, double Z,
                                double phi);
Allocation allocate_masses(const CompositeMeasure& mu, const Mesh& mesh, std::int64_t N, double Z,
                           double lambda);

/// Verifies sum L_i = N, emptiness, and the two-sided per-cell bounds;
/// throws std::logic_error on violation.
void check_allocation(const Allocation& alloc, std::int64_t N, double Z);

/// Places each cell's L_i unit masses (weight 1/Z) on a lattice of spacing
/// a = h / ceil(L_+^(1/3)) centred in the cell, sites taken in an
/// antipodal-paired centre-out order so partially filled cells stay
/// centroid-balanced. All sites across cells lie on one global lattice of
/// pitch a.
EmpiricalMeasure place_lattice(const Mesh& mesh, const Allocation& alloc, double Z);

/// Lattice spacing q = ceil(L_+^(1/3)) via exact integer arithmetic.
std::int64_t lattice_side(std::int64_t L_plus);

/// Full recovery-sequence experiment: for each Z in the schedule, N =
/// round(lambda Z), h = h0 / round(Z^mesh_exponent), then mesh, allocation,
/// lattice and diagnostics. Targets with less mass than lambda get the
/// remaining atoms placed at mutual and nuclear distances >= 1000 times the
/// system diameter.
std::vector<RecoveryRow> recovery_sequence(const CompositeMeasure& mu, const NuclearConfig& nuc,
                                           const LimitParams& params,
                                           const std::vector<double>& Z_schedule,
                                           double mesh_exponent, double h0 = 0.5);

std::string recovery_csv(const std::vector<RecoveryRow>& rows);

/// Riemann sums a^3 sum over lattice points 0 < |y| < alpha of 1/|y|;
/// converges to 2 pi alpha^2.
std::vector<std::pair<double, double>> riemann_check(double alpha,
                                                     const std::vector<double>& a_schedule);
double riemann_lattice_sum(double alpha, double a);

/// Continuum energy of a list of radial targets (signed ball decomposition
/// of annuli; Newton closed forms).
double target_energy(const std::vector<RadialTarget>& targets, const NuclearConfig& nuc,
                     const std::vector<double>& z_fractions);

/// Panel integrals of a bump against the target density.
double target_integral(const TestFunction& f, const std::vector<RadialTarget>& targets);

}  // namespace screening
