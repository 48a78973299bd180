#pragma once

#include <functional>
#include <vector>

#include "screening/core.hpp"
#include "screening/numeric.hpp"

namespace screening {

/// Radial Fourier profile of one measure component: evaluates the transform
/// magnitude m * g(k) with g(0) = 1, |g| <= 1. Point -> 1, shell ->
/// sin(ak)/(ak), ball -> 3(sin(ak) - ak cos(ak))/(ak)^3.
struct RadialFormFactor {
    ComponentKind kind = ComponentKind::Point;
    double scale = 0.0;  // shell/ball radius
    double mass = 0.0;

    double evaluate(double k) const;
    static RadialFormFactor of(const MeasureComponent& c) { return {c.kind, c.radius, c.mass}; }
};

/// Explicit minimizer of the continuum energy with its energy value e(lambda)
/// and the saturated mass min(lambda, z).
struct MinimizerResult {
    CompositeMeasure measure;
    double energy = 0.0;
    double saturated_mass = 0.0;
};

// --- closed-form component electrostatics -----------------------------------

/// Potential of a component at x (unit shells follow the classical shell
/// rule: m/|x-c| outside, m/a inside). Throws std::domain_error for a point
/// component evaluated at its own location.
double component_potential(const MeasureComponent& c, const Vec3& x);

/// Potential of a uniform shell of mass m at x: m / max(|x - center|, a).
double shell_potential(const MeasureComponent& shell, const Vec3& x);

/// Pairwise Coulomb interaction integral of two components (no 1/2 factor):
/// U = integral of 1/|x-y| d mu_1 d mu_2, via Newton closed forms for every
/// pairing; exact m1 m2 / D for disjoint supports. +infinity when both are
/// point atoms at the same location.
ExtReal component_interaction(const MeasureComponent& c1, const MeasureComponent& c2);

/// Same with the kernel min(1/r, 1/alpha); always finite.
double component_interaction_truncated(const MeasureComponent& c1, const MeasureComponent& c2,
                                       double alpha);

/// Mass-normalized average of a radial function g(|x - p|) over a component,
/// where p is any point at distance D from the component's centre.
double average_over_component(const std::function<double(double)>& g, const MeasureComponent& c,
                              double D, double tol = 1e-11);

// --- functionals -------------------------------------------------------------

/// Continuum energy I(mu) = -sum_alpha z_alpha * integral d mu / |x-R_alpha|
/// + (1/2) double integral of 1/|x-y| (diagonal included). Returns
/// +infinity when total mass exceeds lambda or any point atom carries
/// positive mass. Throws std::domain_error when a component's support
/// intersects an open hard core.
ExtReal continuum_energy(const CompositeMeasure& mu, const NuclearConfig& nuc,
                         const LimitParams& params);

/// Coulomb self-energy J(mu) = (1/2) double integral of 1/|x-y|. Throws
/// std::domain_error on positive point masses (infinite self-energy).
double coulomb_self_energy(const CompositeMeasure& mu);

/// Cross term: double integral of 1/|x-y| d mu1 d mu2.
double coulomb_cross_energy(const CompositeMeasure& mu1, const CompositeMeasure& mu2);

/// Coulomb norm of the signed difference: J(mu1 - mu2) = J(mu1) -
/// cross(mu1, mu2) + J(mu2); nonnegative, zero iff mu1 = mu2.
double coulomb_norm(const CompositeMeasure& mu1, const CompositeMeasure& mu2);

/// J(mu1 - mu2) evaluated through the Fourier representation: each component
/// pair contributes w_i w_j (1/pi) * integral of g_i(k) g_j(k) j0(k D_ij) dk,
/// by adaptive panel quadrature with an analytic tail bound. By contract the
/// unequal-total-mass case reports +infinity rather than being silently
/// computed. An eps > 0 multiplies the integrand by exp(-eps k^2).
ExtReal fourier_energy(const CompositeMeasure& mu1, const CompositeMeasure& mu2,
                       double abs_tol = 1e-5);
ExtReal mollified_energy(const CompositeMeasure& mu1, const CompositeMeasure& mu2, double eps,
                         double abs_tol = 1e-5);

/// Explicit continuum minimizer: a single saturated shell for one nucleus;
/// the charge-fraction shells for a molecule at or above neutrality. Throws
/// std::invalid_argument for M >= 2 with lambda < z (no closed form).
MinimizerResult explicit_minimizer(const NuclearConfig& nuc, const LimitParams& params);

/// Radial reduction (hard-core radius normalized to 1):
/// I~(nu) = -sum z m_i / r_i + (1/2) sum_ij m_i m_j min(1/r_i, 1/r_j),
/// diagonal included.
double radial_energy(const RadialMeasure& nu, double z);

/// Minimizes the radial functional over nonnegative masses on a fixed grid
/// with total mass <= lambda (convex QP, projected gradient with Armijo
/// backtracking; terminates when the projected-gradient norm < 1e-10).
/// The grid must contain r = 1.
RadialMeasure radial_minimize(double z, double lambda, const std::vector<double>& grid);

/// Monte Carlo rotation average about a centre: components concentric with
/// the centre are fixed points; every other component is replaced by
/// `samples` rotated copies of mass m/samples. Deterministic given
/// (mu, center, samples).
CompositeMeasure rotation_average(const CompositeMeasure& mu, const Vec3& center, int samples);

}  // namespace screening
