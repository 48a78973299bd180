#include "json.hpp"
#include "screening/optimize.hpp"

namespace screening {

using nlohmann::json;

std::string to_json(const EnergyBreakdown& e) {
    const json j = {{"attraction", e.attraction},
                    {"repulsion", e.repulsion},
                    {"total", e.total},
                    {"nuclear_repulsion", e.nuclear_repulsion}};
    return j.dump(2);
}

std::string to_json(const OptimizeResult& r) {
    json j;
    j["config"] = json::parse(to_json(r.config));
    j["energy"] = json::parse(to_json(r.energy));
    j["absorbed"] = r.absorbed;
    j["per_nucleus_counts"] = r.per_nucleus_counts;
    j["iterations"] = r.iterations;
    j["restarts_used"] = r.restarts_used;
    j["projected_gradient_norm"] = r.projected_gradient_norm;
    j["farthest_distance"] = r.farthest_distance;
    return j.dump(2);
}

}  // namespace screening
