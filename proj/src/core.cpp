#include "screening/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace screening {

NuclearConfig::NuclearConfig(std::vector<Vec3> positions, std::vector<double> charges,
                             double hardcore_radius)
    : positions_(std::move(positions)), charges_(std::move(charges)), d_(hardcore_radius) {
    if (positions_.empty()) throw std::invalid_argument("NuclearConfig: at least one nucleus required");
    if (positions_.size() != charges_.size())
        throw std::invalid_argument("NuclearConfig: positions/charges size mismatch");
    if (!(d_ > 0.0)) throw std::invalid_argument("NuclearConfig: hardcore radius must be positive");
    for (double q : charges_)
        if (!(q > 0.0)) throw std::invalid_argument("NuclearConfig: charges must be strictly positive");
    if (positions_.size() >= 2) {
        double min_sep = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < positions_.size(); ++a)
            for (std::size_t b = a + 1; b < positions_.size(); ++b)
                min_sep = std::min(min_sep, distance(positions_[a], positions_[b]));
        if (!(d_ < 0.5 * min_sep))
            throw std::invalid_argument("NuclearConfig: hard cores overlap (d >= min separation / 2)");
    }
    total_charge_ = 0.0;
    for (double q : charges_) total_charge_ += q;
}

std::vector<double> NuclearConfig::charge_fractions() const {
    std::vector<double> z(charges_.size());
    for (std::size_t a = 0; a < charges_.size(); ++a) z[a] = charges_[a] / total_charge_;
    return z;
}

std::pair<double, int> NuclearConfig::nearest_nucleus(const Vec3& x) const {
    double best = std::numeric_limits<double>::infinity();
    int idx = 0;
    for (std::size_t a = 0; a < positions_.size(); ++a) {
        const double r = distance(x, positions_[a]);
        if (r < best) {
            best = r;
            idx = static_cast<int>(a);
        }
    }
    return {best, idx};
}

bool NuclearConfig::outside_cores(const Vec3& x) const {
    for (const auto& R : positions_)
        if (distance(x, R) < d_) return false;
    return true;
}

bool ElectronConfig::pairwise_distinct() const {
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
            if (points_[i] == points_[j]) return false;
    return true;
}

CompositeMeasure::CompositeMeasure(std::vector<MeasureComponent> components) {
    for (const auto& c : components) add(c);
}

CompositeMeasure& CompositeMeasure::add(const MeasureComponent& c) {
    if (c.mass < 0.0) throw std::invalid_argument("CompositeMeasure: negative component mass");
    if (c.kind != ComponentKind::Point && !(c.radius > 0.0))
        throw std::invalid_argument("CompositeMeasure: shell/ball radius must be positive");
    if (c.mass > 0.0) components_.push_back(c);  // zero-mass components are dropped
    return *this;
}

double CompositeMeasure::total_mass() const {
    double m = 0.0;
    for (const auto& c : components_) m += c.mass;
    return m;
}

bool CompositeMeasure::has_point_mass() const {
    for (const auto& c : components_)
        if (c.kind == ComponentKind::Point && c.mass > 0.0) return true;
    return false;
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<Vec3> points, double weight)
    : points_(std::move(points)), weight_(weight) {
    if (!(weight_ > 0.0)) throw std::invalid_argument("EmpiricalMeasure: weight must be positive");
}

RadialMeasure::RadialMeasure(std::vector<double> radii, std::vector<double> masses)
    : radii_(std::move(radii)), masses_(std::move(masses)) {
    if (radii_.size() != masses_.size())
        throw std::invalid_argument("RadialMeasure: radii/masses size mismatch");
    for (double r : radii_)
        if (!(r >= 1.0)) throw std::invalid_argument("RadialMeasure: radii must be >= 1");
    for (double m : masses_)
        if (!(m >= 0.0)) throw std::invalid_argument("RadialMeasure: masses must be >= 0");
}

double RadialMeasure::total_mass() const {
    double m = 0.0;
    for (double v : masses_) m += v;
    return m;
}

LimitParams::LimitParams(double lambda, std::vector<double> z_fractions)
    : lambda_(lambda), z_(std::move(z_fractions)) {
    if (!(lambda_ > 0.0)) throw std::invalid_argument("LimitParams: lambda must be positive");
    double sum = 0.0;
    for (double z : z_) {
        if (z < 0.0) throw std::invalid_argument("LimitParams: z fractions must be nonnegative");
        sum += z;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("LimitParams: z fractions must sum to 1 (use unnormalized() otherwise)");
}

LimitParams LimitParams::unnormalized(double lambda, std::vector<double> z_fractions) {
    if (!(lambda > 0.0)) throw std::invalid_argument("LimitParams: lambda must be positive");
    for (double z : z_fractions)
        if (z < 0.0) throw std::invalid_argument("LimitParams: z fractions must be nonnegative");
    LimitParams p;
    p.lambda_ = lambda;
    p.z_ = std::move(z_fractions);
    return p;
}

double LimitParams::total_z() const {
    double s = 0.0;
    for (double z : z_) s += z;
    return s;
}

bool check_admissible(const ElectronConfig& cfg, const NuclearConfig& nuc) {
    for (const auto& x : cfg.points())
        if (!nuc.outside_cores(x)) return false;
    return true;
}

EmpiricalMeasure to_empirical(const ElectronConfig& cfg, double Z) {
    if (!(Z > 0.0)) throw std::invalid_argument("to_empirical: Z must be positive");
    if (!cfg.pairwise_distinct())
        throw std::invalid_argument("to_empirical: duplicate points give an invalid empirical measure");
    return EmpiricalMeasure(cfg.points(), 1.0 / Z);
}

std::pair<NuclearConfig, ElectronConfig> rescale(const NuclearConfig& nuc,
                                                 const ElectronConfig& cfg, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("rescale: scale factor must be positive");
    std::vector<Vec3> R = nuc.positions();
    for (auto& r : R) r *= s;
    std::vector<Vec3> x = cfg.points();
    for (auto& p : x) p *= s;
    return {NuclearConfig(std::move(R), nuc.charges(), nuc.hardcore_radius() * s),
            ElectronConfig(std::move(x))};
}

}  // namespace screening
