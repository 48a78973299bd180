#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "screening/vec3.hpp"

namespace screening {

/// Uniform double in [0, 1) from the top 53 bits; implementation-independent
/// given the mt19937_64 stream.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Box-Muller standard normal (single value per call; pairs share draws).
class GaussianDraw {
public:
    explicit GaussianDraw(std::mt19937_64& gen) : gen_(gen) {}
    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(gen_);
        while (u1 <= 0.0) u1 = uniform01(gen_);
        const double u2 = uniform01(gen_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64& gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline Vec3 random_unit_vector(std::mt19937_64& gen) {
    GaussianDraw g(gen);
    const double x = g.next(), y = g.next(), z = g.next();
    const Vec3 v{x, y, z};
    const double n = v.norm();
    return n > 0.0 ? v / n : Vec3{1.0, 0.0, 0.0};
}

/// Uniform random rotation as a unit quaternion (w, x, y, z).
inline std::array<double, 4> random_quaternion(std::mt19937_64& gen) {
    GaussianDraw g(gen);
    std::array<double, 4> q{g.next(), g.next(), g.next(), g.next()};
    double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (n == 0.0) return {1.0, 0.0, 0.0, 0.0};
    for (auto& c : q) c /= n;
    return q;
}

inline Vec3 rotate(const std::array<double, 4>& q, const Vec3& v) {
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    // v' = v + 2 u x (u x v + w v), u = (x, y, z)
    const Vec3 u{x, y, z};
    const Vec3 t = cross(u, v) * 2.0;
    return v + t * w + cross(u, t);
}

}  // namespace screening
