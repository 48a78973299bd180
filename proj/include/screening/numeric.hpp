#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace screening {

/// Compensated (Kahan) accumulator. Pair sums over particle configurations
/// use a fixed deterministic ordering with this accumulator so that
/// regression tables are bit-reproducible.
class KahanSum {
public:
    void add(double v) {
        const double y = v - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Extended real used for functionals that take +infinity as a legitimate
/// value (mass-constraint violations, measures of the wrong form). This is a
/// sentinel variant, not a floating-point overflow.
class ExtReal {
public:
    ExtReal() : value_(0.0), infinite_(false) {}
    ExtReal(double v) : value_(v), infinite_(false) {}

    static ExtReal infinity() {
        ExtReal r;
        r.infinite_ = true;
        return r;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    /// Finite value; throws if the sentinel is +infinity.
    double value() const {
        if (infinite_) throw std::logic_error("ExtReal: value() on +infinity");
        return value_;
    }

    /// Value with +infinity mapped to the IEEE infinity (for printing).
    double as_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

private:
    double value_;
    bool infinite_;
};

/// splitmix64; used to derive decorrelated seeds and stable pseudo-random
/// orderings from integer keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace runtime {

/// Worker threads used by restart loops, schedule sweeps and large pair
/// sums. Results are deterministic regardless of this setting.
void set_threads(int n);
int threads();

/// Runs fn(i) for i in [0, n); partitions work over the thread pool.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace runtime

}  // namespace screening
