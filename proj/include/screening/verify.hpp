#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "screening/core.hpp"

namespace screening {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the full invariant battery (one check per documented invariant) and
/// returns one row per check. Deterministic given the seed.
std::vector<VerifyCheck> run_verification(std::uint64_t seed = 0);

/// Random shell/ball mixture supported outside the hard cores of `nuc` when
/// given (centres pushed away from the nuclei), for property checks.
CompositeMeasure random_composite(std::mt19937_64& gen, int max_components,
                                  const NuclearConfig* nuc = nullptr);

/// Random admissible electron configuration around the nuclei.
ElectronConfig random_admissible_config(std::mt19937_64& gen, int N, const NuclearConfig& nuc,
                                        double min_separation = 0.2);

}  // namespace screening
