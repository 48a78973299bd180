#include "screening/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "screening/random.hpp"

namespace screening {

double TestFunction::radial(double s) const {
    const double t = s / width;
    if (t >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
}

TestFunctionPanel make_panel(const Vec3& center, double extent) {
    TestFunctionPanel panel;
    auto add = [&](const Vec3& offset, double width) {
        panel.functions.push_back({center + offset * extent, width * extent, 1.0});
    };
    add({0, 0, 0}, 0.9);
    add({0.5, 0, 0}, 0.6);
    add({-0.5, 0, 0}, 0.6);
    add({0, 0.5, 0}, 0.6);
    add({0, -0.5, 0}, 0.6);
    add({0, 0, 0.5}, 0.6);
    add({0, 0, -0.5}, 0.6);
    const double s = 0.5 / std::numbers::sqrt3;
    add({s, s, s}, 0.5);
    add({-s, s, -s}, 0.5);
    add({s, -s, -s}, 0.5);
    add({-s, -s, s}, 0.5);
    add({0, 0, 0}, 1.5);
    return panel;
}

double integrate(const TestFunction& f, const EmpiricalMeasure& mu) {
    KahanSum acc;
    for (const auto& p : mu.points()) acc.add(f.value(p));
    return acc.value() * mu.weight();
}

double integrate(const TestFunction& f, const MeasureComponent& c) {
    const double D = distance(c.center, f.center);
    if (D >= f.width + c.radius) return 0.0;  // bump support misses the component
    auto g = [&](double s) { return f.radial(s); };
    return c.mass * average_over_component(g, c, D, 1e-12);
}

double integrate(const TestFunction& f, const CompositeMeasure& mu) {
    KahanSum acc;
    for (const auto& c : mu.components()) acc.add(integrate(f, c));
    return acc.value();
}

std::vector<double> panel_integrals(const TestFunctionPanel& panel, const EmpiricalMeasure& mu) {
    std::vector<double> out;
    out.reserve(panel.functions.size());
    for (const auto& f : panel.functions) out.push_back(integrate(f, mu));
    return out;
}

std::vector<double> panel_integrals(const TestFunctionPanel& panel, const CompositeMeasure& mu) {
    std::vector<double> out;
    out.reserve(panel.functions.size());
    for (const auto& f : panel.functions) out.push_back(integrate(f, mu));
    return out;
}

double weakstar_error(const std::vector<double>& ints1, const std::vector<double>& ints2) {
    if (ints1.size() != ints2.size() || ints1.empty())
        throw std::invalid_argument("weakstar_error: panels must be nonempty and matching");
    double m = 0.0;
    for (std::size_t i = 0; i < ints1.size(); ++i) m = std::max(m, std::abs(ints1[i] - ints2[i]));
    return m;
}

double weakstar_error(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                      const TestFunctionPanel& panel) {
    return weakstar_error(panel_integrals(panel, mu1), panel_integrals(panel, mu2));
}

double weakstar_error(const EmpiricalMeasure& mu1, const CompositeMeasure& mu2,
                      const TestFunctionPanel& panel) {
    return weakstar_error(panel_integrals(panel, mu1), panel_integrals(panel, mu2));
}

double weakstar_error(const CompositeMeasure& mu1, const CompositeMeasure& mu2,
                      const TestFunctionPanel& panel) {
    return weakstar_error(panel_integrals(panel, mu1), panel_integrals(panel, mu2));
}

const std::vector<Cap>& cap_panel() {
    static const std::vector<Cap> panel = [] {
        std::vector<Cap> caps;
        const double half = std::numbers::pi / 2.0;
        caps.push_back({{1, 0, 0}, half});
        caps.push_back({{-1, 0, 0}, half});
        caps.push_back({{0, 1, 0}, half});
        caps.push_back({{0, -1, 0}, half});
        caps.push_back({{0, 0, 1}, half});
        caps.push_back({{0, 0, -1}, half});
        std::mt19937_64 gen(42);
        for (int k = 0; k < 20; ++k) caps.push_back({random_unit_vector(gen), std::numbers::pi / 3.0});
        return caps;
    }();
    return panel;
}

double cap_area_fraction(double angle) { return 0.5 * (1.0 - std::cos(angle)); }

ScreeningStats screening_stats(const OptimizeResult& result, const NuclearConfig& nuc) {
    if (!result.absorbed)
        throw std::invalid_argument("screening_stats: configuration is not absorbed on the spheres");
    const auto& x = result.config.points();
    const double N = static_cast<double>(x.size());
    const double Z = nuc.total_charge();
    const double d = nuc.hardcore_radius();
    const AbsorptionReport rep = detect_absorption(result.config, nuc, 1e-6);

    ScreeningStats stats;
    stats.per_nucleus_count = rep.counts;
    stats.neutrality_ratios.resize(nuc.size());
    stats.dipole_norms.resize(nuc.size());
    for (std::size_t a = 0; a < nuc.size(); ++a) {
        stats.neutrality_ratios[a] = rep.counts[a] / nuc.charges()[a];
        Vec3 dip{0, 0, 0};
        for (std::size_t i = 0; i < x.size(); ++i)
            if (rep.nucleus_of[i] == static_cast<int>(a)) dip += x[i] - nuc.positions()[a];
        stats.dipole_norms[a] =
            rep.counts[a] > 0 ? dip.norm() / (d * static_cast<double>(rep.counts[a])) : 0.0;
    }

    double disc = 0.0;
    for (std::size_t a = 0; a < nuc.size(); ++a) {
        const double za = nuc.charges()[a] / Z;
        for (const auto& cap : cap_panel()) {
            const double cos_angle = std::cos(cap.angle);
            int count = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (rep.nucleus_of[i] != static_cast<int>(a)) continue;
                const Vec3 dir = normalized(x[i] - nuc.positions()[a]);
                if (dot(dir, cap.axis) >= cos_angle) ++count;
            }
            disc = std::max(disc, std::abs(count / N - za * cap_area_fraction(cap.angle)));
        }
    }
    stats.cap_discrepancy = disc;
    stats.energy_over_N2 = result.energy.total / (N * N);
    return stats;
}

std::string to_json(const ScreeningStats& s) {
    const nlohmann::json j = {{"per_nucleus_count", s.per_nucleus_count},
                              {"neutrality_ratios", s.neutrality_ratios},
                              {"dipole_norms", s.dipole_norms},
                              {"cap_discrepancy", s.cap_discrepancy},
                              {"energy_over_N2", s.energy_over_N2}};
    return j.dump(2);
}

std::string SweepTable::csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::vector<double> integer_charges(const std::vector<double>& split, int Z) {
    const std::size_t M = split.size();
    double sum = 0.0;
    for (double s : split) {
        if (!(s > 0.0)) throw std::invalid_argument("integer_charges: split entries must be positive");
        sum += s;
    }
    std::vector<int> q(M);
    std::vector<std::pair<double, std::size_t>> rem(M);
    int assigned = 0;
    for (std::size_t a = 0; a < M; ++a) {
        const double share = static_cast<double>(Z) * split[a] / sum;
        q[a] = static_cast<int>(std::floor(share));
        rem[a] = {share - q[a], a};
        assigned += q[a];
    }
    std::sort(rem.begin(), rem.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first > r.first;
        return l.second < r.second;
    });
    for (int k = 0; k < Z - assigned; ++k) ++q[rem[static_cast<std::size_t>(k) % M].second];
    // Integer charges must stay positive; steal from the largest when a cell
    // rounds to zero.
    for (std::size_t a = 0; a < M; ++a) {
        if (q[a] == 0) {
            const std::size_t big =
                std::distance(q.begin(), std::max_element(q.begin(), q.end()));
            --q[big];
            ++q[a];
        }
    }
    std::vector<double> out(M);
    for (std::size_t a = 0; a < M; ++a) out[a] = static_cast<double>(q[a]);
    return out;
}

std::uint64_t derived_seed(std::uint64_t base, std::size_t entry) {
    return splitmix64(base ^ (0x5EEDC0DEull + static_cast<std::uint64_t>(entry) * 0x9E3779B9ull));
}

SweepTable neutrality_sweep(const NuclearConfig& base, const std::vector<int>& Z_schedule,
                            const OptimizeOptions& opts) {
    if (Z_schedule.empty()) throw std::invalid_argument("neutrality_sweep: empty schedule");
    const auto split = base.charge_fractions();
    SweepTable table;
    table.header = {"Z", "N", "max_ratio_dev"};
    for (std::size_t a = 0; a < base.size(); ++a) table.header.push_back("count_" + std::to_string(a));
    for (std::size_t a = 0; a < base.size(); ++a) table.header.push_back("ratio_" + std::to_string(a));
    table.rows.resize(Z_schedule.size());

    for (std::size_t k = 0; k < Z_schedule.size(); ++k) {
        const int Z = Z_schedule[k];
        const NuclearConfig nuc(base.positions(), integer_charges(split, Z), base.hardcore_radius());
        OptimizeOptions o = opts;
        o.seed = derived_seed(opts.seed, k);
        const OptimizeResult res = minimize(Z, nuc, o);
        const AbsorptionReport rep = detect_absorption(res.config, nuc, 1e-6);
        std::vector<double> row = {static_cast<double>(Z), static_cast<double>(Z), 0.0};
        double dev = 0.0;
        for (std::size_t a = 0; a < nuc.size(); ++a)
            dev = std::max(dev, std::abs(rep.counts[a] / nuc.charges()[a] - 1.0));
        row[2] = dev;
        for (std::size_t a = 0; a < nuc.size(); ++a) row.push_back(rep.counts[a]);
        for (std::size_t a = 0; a < nuc.size(); ++a) row.push_back(rep.counts[a] / nuc.charges()[a]);
        table.rows[k] = std::move(row);
    }
    return table;
}

EnergySweepResult energy_sweep(const NuclearConfig& base, const std::vector<int>& Z_schedule,
                               const OptimizeOptions& opts) {
    if (Z_schedule.empty()) throw std::invalid_argument("energy_sweep: empty schedule");
    const auto split = base.charge_fractions();
    const LimitParams limit(1.0, split);
    const double limit_value = explicit_minimizer(base, limit).energy;

    EnergySweepResult out;
    out.table.header = {"Z", "N", "V_over_N2", "limit", "gap", "abs_gap"};
    out.table.rows.resize(Z_schedule.size());
    for (std::size_t k = 0; k < Z_schedule.size(); ++k) {
        const int Z = Z_schedule[k];
        const NuclearConfig nuc(base.positions(), integer_charges(split, Z), base.hardcore_radius());
        OptimizeOptions o = opts;
        o.seed = derived_seed(opts.seed, k);
        const OptimizeResult res = minimize(Z, nuc, o);
        const double vn2 = res.energy.total / (static_cast<double>(Z) * Z);
        out.table.rows[k] = {static_cast<double>(Z), static_cast<double>(Z), vn2,
                             limit_value,            vn2 - limit_value,      std::abs(vn2 - limit_value)};
    }
    std::vector<double> Ns, gaps;
    for (const auto& row : out.table.rows) {
        Ns.push_back(row[1]);
        gaps.push_back(row[5]);
    }
    out.rate_exponent = fit_rate_exponent(Ns, gaps);
    return out;
}

SweepTable saturation_curve(const NuclearConfig& base, int Z,
                            const std::vector<double>& lambda_schedule,
                            const OptimizeOptions& opts) {
    if (lambda_schedule.empty()) throw std::invalid_argument("saturation_curve: empty schedule");
    const auto split = base.charge_fractions();
    const NuclearConfig nuc(base.positions(), integer_charges(split, Z), base.hardcore_radius());
    const double d = nuc.hardcore_radius();
    SweepTable table;
    table.header = {"lambda", "Z", "N", "V_over_Z2", "farthest_distance", "escaped_count"};
    table.rows.resize(lambda_schedule.size());
    for (std::size_t k = 0; k < lambda_schedule.size(); ++k) {
        const double lambda = lambda_schedule[k];
        const int N = static_cast<int>(std::lround(lambda * Z));
        OptimizeOptions o = opts;
        o.seed = derived_seed(opts.seed, k);
        const OptimizeResult res = minimize(N, nuc, o);
        int escaped = 0;
        for (const auto& p : res.config.points())
            if (nuc.nearest_nucleus(p).first > 10.0 * d) ++escaped;
        table.rows[k] = {lambda,
                         static_cast<double>(Z),
                         static_cast<double>(N),
                         res.energy.total / (static_cast<double>(Z) * Z),
                         res.farthest_distance,
                         static_cast<double>(escaped)};
    }
    return table;
}

SweepTable instability_sweep(const NuclearConfig& base, const std::vector<int>& Z_schedule,
                             const OptimizeOptions& opts, double distance_factor,
                             double max_ratio) {
    if (Z_schedule.empty()) throw std::invalid_argument("instability_sweep: empty schedule");
    const auto split = base.charge_fractions();
    SweepTable table;
    table.header = {"Z", "N_star_proxy", "ratio"};
    for (std::size_t k = 0; k < Z_schedule.size(); ++k) {
        const int Z = Z_schedule[k];
        const NuclearConfig nuc(base.positions(), integer_charges(split, Z), base.hardcore_radius());
        const double cutoff = distance_factor * nuc.hardcore_radius();
        const int cap = static_cast<int>(std::ceil(max_ratio * Z));
        int n_star = Z - 1;
        for (int N = Z; N <= cap; ++N) {
            OptimizeOptions o = opts;
            o.seed = derived_seed(opts.seed, k * 1024 + static_cast<std::size_t>(N - Z));
            const OptimizeResult res = minimize(N, nuc, o);
            if (res.farthest_distance <= cutoff)
                n_star = N;
            else
                break;
        }
        table.rows.push_back({static_cast<double>(Z), static_cast<double>(n_star),
                              static_cast<double>(n_star) / static_cast<double>(Z)});
    }
    return table;
}

double fit_rate_exponent(const std::vector<double>& Ns, const std::vector<double>& gaps) {
    if (Ns.size() != gaps.size() || Ns.size() < 2) return 0.0;
    std::size_t start = Ns.size() / 2;  // fit over the top half of the schedule
    if (Ns.size() - start < 2) start = Ns.size() - 2;
    std::vector<double> xs, ys;
    for (std::size_t i = start; i < Ns.size(); ++i) {
        if (gaps[i] <= 0.0) continue;
        xs.push_back(std::log(Ns[i]));
        ys.push_back(std::log(gaps[i]));
    }
    if (xs.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace screening
