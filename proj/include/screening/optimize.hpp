#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "screening/core.hpp"
#include "screening/energy.hpp"

namespace screening {

struct OptimizeOptions {
    int restarts = 8;
    int max_iterations = 3000;
    double gradient_tolerance = 1e-7;
    std::uint64_t seed = 0;
    /// Initial points are sampled on spheres of this factor times d about
    /// the nuclei, allocated proportionally to the charges.
    double initial_radius_factor = 1.5;
    /// Test hook: called on every accepted iterate (may run on worker
    /// threads when restarts run in parallel).
    std::function<void(int restart, int iteration, double energy)> on_iteration;
};

struct OptimizeResult {
    ElectronConfig config;
    EnergyBreakdown energy;
    bool absorbed = false;
    std::vector<int> per_nucleus_counts;
    int iterations = 0;
    int restarts_used = 0;
    double projected_gradient_norm = 0.0;
    /// max over electrons of the distance to the nearest nucleus centre;
    /// feeds the escape diagnostics for overfilled systems.
    double farthest_distance = 0.0;
};

struct AbsorptionReport {
    bool absorbed = false;
    std::vector<int> nucleus_of;  // nearest nucleus per electron (lowest index wins ties)
    std::vector<int> counts;      // electrons assigned per nucleus
};

/// Multistart projected descent over the hard-core admissible set:
/// Barzilai-Borwein steps with Armijo backtracking and radial projection
/// onto the spheres, followed by an on-sphere polish when every electron has
/// landed near a sphere. Restarts run in parallel with per-restart seeded
/// generators (seed xor restart index); the result is deterministic for
/// fixed options regardless of thread count.
OptimizeResult minimize(int N, const NuclearConfig& nuc, const OptimizeOptions& opts);

/// Re-parametrizes each electron on its nearest sphere and runs Riemannian
/// descent there. Requires every electron within 0.05 d of some sphere (or
/// result.absorbed); output positions satisfy |x - R| = d to rounding.
OptimizeResult refine_on_spheres(const OptimizeResult& result, const NuclearConfig& nuc,
                                 const OptimizeOptions& opts);

/// True iff every electron lies within tol of some hard-core sphere, with
/// each electron assigned to its nearest nucleus.
AbsorptionReport detect_absorption(const ElectronConfig& cfg, const NuclearConfig& nuc, double tol);

std::string to_json(const EnergyBreakdown& e);
std::string to_json(const OptimizeResult& r);

}  // namespace screening
