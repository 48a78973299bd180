#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "screening/numeric.hpp"
#include "screening/vec3.hpp"

namespace screening {

/// Fixed nuclei: positions R_alpha, charges Z_alpha > 0, and the hard-core
/// radius d. The hard cores are the open balls of radius d about the nuclei;
/// their union is written Omega throughout. For M >= 2 the cores must not
/// overlap: d < min pair distance / 2.
class NuclearConfig {
public:
    NuclearConfig(std::vector<Vec3> positions, std::vector<double> charges, double hardcore_radius);

    const std::vector<Vec3>& positions() const { return positions_; }
    const std::vector<double>& charges() const { return charges_; }
    double hardcore_radius() const { return d_; }

    std::size_t size() const { return positions_.size(); }
    double total_charge() const { return total_charge_; }

    /// Charge fractions Z_alpha / Z.
    std::vector<double> charge_fractions() const;

    /// Distance from x to the nearest nucleus centre; index of that nucleus
    /// (lowest index wins ties).
    std::pair<double, int> nearest_nucleus(const Vec3& x) const;

    /// True if x lies in the closed complement of Omega, i.e. at distance
    /// >= d from every nucleus.
    bool outside_cores(const Vec3& x) const;

private:
    std::vector<Vec3> positions_;
    std::vector<double> charges_;
    double d_;
    double total_charge_;
};

/// N electron positions. Admissibility with respect to a NuclearConfig is a
/// separate predicate (check_admissible); the type itself only requires
/// pairwise-distinct points for finite energy.
class ElectronConfig {
public:
    ElectronConfig() = default;
    explicit ElectronConfig(std::vector<Vec3> points) : points_(std::move(points)) {}

    const std::vector<Vec3>& points() const { return points_; }
    std::vector<Vec3>& points() { return points_; }
    std::size_t size() const { return points_.size(); }

    bool pairwise_distinct() const;

private:
    std::vector<Vec3> points_;
};

enum class ComponentKind { Point, Shell, Ball };

/// One tagged component of a CompositeMeasure: a point atom, a uniform
/// spherical shell (surface measure), or a uniform ball (volume measure).
struct MeasureComponent {
    ComponentKind kind = ComponentKind::Point;
    Vec3 center;
    double radius = 0.0;  // unused for Point
    double mass = 0.0;

    static MeasureComponent point(const Vec3& c, double m) { return {ComponentKind::Point, c, 0.0, m}; }
    static MeasureComponent shell(const Vec3& c, double a, double m) { return {ComponentKind::Shell, c, a, m}; }
    static MeasureComponent ball(const Vec3& c, double a, double m) { return {ComponentKind::Ball, c, a, m}; }
};

/// Finite sum of point atoms, uniform shells and uniform balls. This is the
/// measure class on which the continuum energy and the Coulomb norm have
/// closed forms. Zero-mass components are dropped on construction.
class CompositeMeasure {
public:
    CompositeMeasure() = default;
    explicit CompositeMeasure(std::vector<MeasureComponent> components);

    const std::vector<MeasureComponent>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    double total_mass() const;

    bool has_point_mass() const;

    CompositeMeasure& add(const MeasureComponent& c);

private:
    std::vector<MeasureComponent> components_;
};

/// Normalized sum of point masses (1/Z per atom) representing an electron
/// configuration as a Radon measure.
class EmpiricalMeasure {
public:
    EmpiricalMeasure() : weight_(1.0) {}
    EmpiricalMeasure(std::vector<Vec3> points, double weight);

    const std::vector<Vec3>& points() const { return points_; }
    double weight() const { return weight_; }
    double total_mass() const { return weight_ * static_cast<double>(points_.size()); }
    std::size_t size() const { return points_.size(); }

private:
    std::vector<Vec3> points_;
    double weight_;
};

/// Weighted atoms on [1, infinity): rotation-invariant measures for the
/// radial reduction of the continuum functional (hard-core radius
/// normalized to 1).
class RadialMeasure {
public:
    RadialMeasure() = default;
    RadialMeasure(std::vector<double> radii, std::vector<double> masses);

    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& masses() const { return masses_; }
    std::size_t size() const { return radii_.size(); }
    double total_mass() const;

private:
    std::vector<double> radii_;
    std::vector<double> masses_;
};

/// Limit parameters: filling factor lambda = lim N/Z and charge fractions
/// z_alpha = lim Z_alpha/Z. The normalized constructor enforces sum z = 1
/// (to 1e-12); unnormalized() admits general nonnegative z for internal
/// closed-form tests.
class LimitParams {
public:
    LimitParams(double lambda, std::vector<double> z_fractions);
    static LimitParams unnormalized(double lambda, std::vector<double> z_fractions);

    double lambda() const { return lambda_; }
    const std::vector<double>& z_fractions() const { return z_; }
    double total_z() const;

private:
    LimitParams() = default;
    double lambda_ = 1.0;
    std::vector<double> z_;
};

// --- operations ------------------------------------------------------------

/// Admissibility: every electron at distance >= d (inclusive) from every
/// nucleus, with zero tolerance. Total function.
bool check_admissible(const ElectronConfig& cfg, const NuclearConfig& nuc);

/// Empirical measure with one atom of mass 1/Z per electron. Throws
/// std::invalid_argument on duplicate points.
EmpiricalMeasure to_empirical(const ElectronConfig& cfg, double Z);

/// Uniform rescale of all lengths by s > 0. Energies scale by 1/s.
std::pair<NuclearConfig, ElectronConfig> rescale(const NuclearConfig& nuc,
                                                 const ElectronConfig& cfg, double s);

// --- JSON serialization (external interface) --------------------------------

std::string to_json(const NuclearConfig& nuc);
std::string to_json(const ElectronConfig& cfg);
std::string to_json(const CompositeMeasure& mu);
NuclearConfig nuclear_config_from_json(const std::string& text);
ElectronConfig electron_config_from_json(const std::string& text);
CompositeMeasure composite_measure_from_json(const std::string& text);

}  // namespace screening
