#pragma once

#include <string>
#include <vector>

#include "screening/continuum.hpp"
#include "screening/core.hpp"
#include "screening/optimize.hpp"

namespace screening {

/// Smooth compactly supported bump: amplitude * exp(1 - 1/(1 - t^2)) with
/// t = |x - center| / width inside the support ball, 0 outside.
struct TestFunction {
    Vec3 center;
    double width = 1.0;
    double amplitude = 1.0;

    double radial(double s) const;
    double value(const Vec3& x) const { return radial(distance(x, center)); }
};

/// Panel of bumps spanning an experiment region; weak* convergence is
/// monitored through integrals against these.
struct TestFunctionPanel {
    std::vector<TestFunction> functions;
};

/// Deterministic 12-bump panel covering a ball of the given half-extent.
TestFunctionPanel make_panel(const Vec3& center, double extent);

double integrate(const TestFunction& f, const EmpiricalMeasure& mu);
double integrate(const TestFunction& f, const MeasureComponent& c);
double integrate(const TestFunction& f, const CompositeMeasure& mu);

std::vector<double> panel_integrals(const TestFunctionPanel& panel, const EmpiricalMeasure& mu);
std::vector<double> panel_integrals(const TestFunctionPanel& panel, const CompositeMeasure& mu);

/// Max over the panel of |integral f d mu1 - integral f d mu2|.
double weakstar_error(const std::vector<double>& ints1, const std::vector<double>& ints2);
double weakstar_error(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                      const TestFunctionPanel& panel);
double weakstar_error(const EmpiricalMeasure& mu1, const CompositeMeasure& mu2,
                      const TestFunctionPanel& panel);
double weakstar_error(const CompositeMeasure& mu1, const CompositeMeasure& mu2,
                      const TestFunctionPanel& panel);

/// One spherical cap on a hard-core sphere: electrons with direction within
/// `angle` of `axis` count as inside.
struct Cap {
    Vec3 axis;
    double angle = 0.0;
};

/// Fixed cap panel: the six axis hemispheres plus twenty caps of angular
/// radius pi/3 with axes drawn once from a seed-42 generator.
const std::vector<Cap>& cap_panel();

/// Uniform-measure fraction of a sphere inside a cap of angular radius
/// `angle`: (1 - cos angle) / 2.
double cap_area_fraction(double angle);

struct ScreeningStats {
    std::vector<int> per_nucleus_count;
    std::vector<double> neutrality_ratios;  // count_alpha / Z_alpha
    std::vector<double> dipole_norms;       // |sum (x_i - R_alpha)| / (d * count_alpha)
    double cap_discrepancy = 0.0;
    double energy_over_N2 = 0.0;
};

/// Per-nucleus screening statistics of an absorbed minimizer. Throws
/// std::invalid_argument when the result is not absorbed.
ScreeningStats screening_stats(const OptimizeResult& result, const NuclearConfig& nuc);
std::string to_json(const ScreeningStats& s);

/// Plain numeric table with a schema-stable header row.
struct SweepTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string csv() const;
};

/// Integer charges approximating split * Z by largest remainder (every
/// charge at least 1).
std::vector<double> integer_charges(const std::vector<double>& split, int Z);

/// Neutral sweeps N = Z along the schedule, charge split taken from the base
/// configuration. Rows: Z, N, max |ratio - 1|, then per-nucleus counts and
/// ratios.
SweepTable neutrality_sweep(const NuclearConfig& base, const std::vector<int>& Z_schedule,
                            const OptimizeOptions& opts);

struct EnergySweepResult {
    SweepTable table;  // Z, N, V_over_N2, limit, gap, abs_gap
    double rate_exponent = 0.0;
};

/// Energy convergence toward the continuum limit value (N = Z).
EnergySweepResult energy_sweep(const NuclearConfig& base, const std::vector<int>& Z_schedule,
                               const OptimizeOptions& opts);

/// Filling-factor sweep at fixed Z: rows lambda, Z, N, V_over_Z2,
/// farthest_distance, escaped_count (> 10 d from every nucleus).
SweepTable saturation_curve(const NuclearConfig& base, int Z,
                            const std::vector<double>& lambda_schedule,
                            const OptimizeOptions& opts);

/// Escape-based proxy for the attainment threshold: per Z, the largest N
/// whose best configuration keeps every electron within distance_factor * d
/// of the nuclei. Rows: Z, N_star_proxy, ratio.
SweepTable instability_sweep(const NuclearConfig& base, const std::vector<int>& Z_schedule,
                             const OptimizeOptions& opts, double distance_factor = 10.0,
                             double max_ratio = 1.6);

/// Least-squares slope of log|gap| against log N over the top half of the
/// schedule.
double fit_rate_exponent(const std::vector<double>& Ns, const std::vector<double>& gaps);

/// Seed for schedule entry k, decorrelated from the base seed.
std::uint64_t derived_seed(std::uint64_t base, std::size_t entry);

}  // namespace screening
