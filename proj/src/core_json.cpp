#include <stdexcept>

#include "json.hpp"
#include "screening/core.hpp"

namespace screening {

using nlohmann::json;

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string to_json(const NuclearConfig& nuc) {
    json j;
    j["nuclei"] = json::array();
    for (std::size_t a = 0; a < nuc.size(); ++a)
        j["nuclei"].push_back({{"R", vec_to_json(nuc.positions()[a])}, {"Z", nuc.charges()[a]}});
    j["d"] = nuc.hardcore_radius();
    return j.dump(2);
}

NuclearConfig nuclear_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("nuclei") || !j.contains("d"))
        throw std::invalid_argument("nuclear config: missing 'nuclei' or 'd'");
    std::vector<Vec3> R;
    std::vector<double> Z;
    for (const auto& item : j.at("nuclei")) {
        R.push_back(vec_from_json(item.at("R")));
        Z.push_back(item.at("Z").get<double>());
    }
    return NuclearConfig(std::move(R), std::move(Z), j.at("d").get<double>());
}

std::string to_json(const ElectronConfig& cfg) {
    json j;
    j["electrons"] = json::array();
    for (const auto& p : cfg.points()) j["electrons"].push_back(vec_to_json(p));
    return j.dump(2);
}

ElectronConfig electron_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("electrons")) throw std::invalid_argument("electron config: missing 'electrons'");
    std::vector<Vec3> pts;
    for (const auto& item : j.at("electrons")) pts.push_back(vec_from_json(item));
    return ElectronConfig(std::move(pts));
}

namespace {

const char* kind_name(ComponentKind k) {
    switch (k) {
        case ComponentKind::Point: return "point";
        case ComponentKind::Shell: return "shell";
        case ComponentKind::Ball: return "ball";
    }
    return "point";
}

ComponentKind kind_from_name(const std::string& s) {
    if (s == "point") return ComponentKind::Point;
    if (s == "shell") return ComponentKind::Shell;
    if (s == "ball") return ComponentKind::Ball;
    throw std::invalid_argument("measure component: unknown kind '" + s + "'");
}

}  // namespace

std::string to_json(const CompositeMeasure& mu) {
    json j;
    j["components"] = json::array();
    for (const auto& c : mu.components()) {
        json item = {{"kind", kind_name(c.kind)}, {"center", vec_to_json(c.center)}, {"mass", c.mass}};
        if (c.kind != ComponentKind::Point) item["radius"] = c.radius;
        j["components"].push_back(item);
    }
    return j.dump(2);
}

CompositeMeasure composite_measure_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("components")) throw std::invalid_argument("measure: missing 'components'");
    CompositeMeasure mu;
    for (const auto& item : j.at("components")) {
        MeasureComponent c;
        c.kind = kind_from_name(item.at("kind").get<std::string>());
        c.center = vec_from_json(item.at("center"));
        c.mass = item.at("mass").get<double>();
        if (c.kind != ComponentKind::Point) c.radius = item.at("radius").get<double>();
        mu.add(c);
    }
    return mu;
}

}  // namespace screening
