#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "screening/analysis.hpp"
#include "screening/continuum.hpp"
#include "screening/core.hpp"
#include "screening/optimize.hpp"
#include "screening/recover.hpp"
#include "screening/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace screening;

namespace {

constexpr const char* kVersion = "screening 0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

json load_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ":" + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
}

json require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing required field '" + key + "'");
    return j.at(key);
}

NuclearConfig load_nuclei(const json& cfg, const std::string& where) {
    const std::string path = require(cfg, "nuclei_file", where).get<std::string>();
    if (!fs::exists(path)) throw ConfigError(where + ": nuclei_file does not exist: " + path);
    return nuclear_config_from_json(read_file(path));
}

OptimizeOptions optimizer_options(const json& cfg) {
    OptimizeOptions opts;
    opts.seed = cfg.value("seed", std::uint64_t{0});
    if (cfg.contains("optimizer")) {
        const json& o = cfg.at("optimizer");
        opts.restarts = o.value("restarts", opts.restarts);
        opts.max_iterations = o.value("max_iterations", opts.max_iterations);
        opts.gradient_tolerance = o.value("gradient_tolerance", opts.gradient_tolerance);
        opts.initial_radius_factor = o.value("initial_radius_factor", opts.initial_radius_factor);
        if (opts.restarts < 1 || opts.max_iterations < 1 || !(opts.gradient_tolerance > 0.0))
            throw ConfigError("optimizer: bounds must be positive");
    }
    return opts;
}

std::vector<int> int_schedule(const json& cfg, const std::string& key, const std::string& where) {
    const json arr = require(cfg, key, where);
    if (!arr.is_array() || arr.empty()) throw ConfigError(where + ": '" + key + "' must be a nonempty array");
    std::vector<int> out;
    for (const auto& v : arr) out.push_back(v.get<int>());
    return out;
}

void write_metadata(const fs::path& path, const std::string& command, const json& cfg,
                    std::uint64_t seed, int threads) {
    json meta;
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["seed"] = seed;
    meta["threads"] = threads;
    meta["options"] = cfg;
    const auto now = std::chrono::system_clock::now();
    meta["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    write_file(path, meta.dump(2) + "\n");
}

int cmd_minimize(const json& cfg, const fs::path& out) {
    const NuclearConfig nuc = load_nuclei(cfg, "minimize");
    const int N = require(cfg, "N", "minimize").get<int>();
    const OptimizeOptions opts = optimizer_options(cfg);
    const OptimizeResult result = minimize(N, nuc, opts);
    write_file(out / "minimize_result.json", to_json(result) + "\n");
    if (result.absorbed)
        write_file(out / "screening_stats.json", to_json(screening_stats(result, nuc)) + "\n");
    write_metadata(out / "minimize_result.meta.json", "minimize", cfg, opts.seed, runtime::threads());
    std::printf("minimize: N=%d total=%.12g absorbed=%s -> %s\n", N, result.energy.total,
                result.absorbed ? "true" : "false", (out / "minimize_result.json").c_str());
    return 0;
}

int cmd_continuum(const json& cfg, const fs::path& out) {
    const NuclearConfig nuc = load_nuclei(cfg, "continuum");
    const double lambda = cfg.value("lambda", 1.0);
    const LimitParams params(lambda, nuc.charge_fractions());
    const MinimizerResult min = explicit_minimizer(nuc, params);

    // Cross checks: completing the square against a sample ball, and the
    // Fourier route against the closed forms. The sample sits past the
    // rightmost nucleus so its support clears every hard core.
    const double d = nuc.hardcore_radius();
    double max_x = nuc.positions()[0].x;
    for (const auto& R : nuc.positions()) max_x = std::max(max_x, R.x);
    const Vec3 sample_center{max_x + 2.0 * d + 2.0, 0.0, 0.0};
    CompositeMeasure sample({MeasureComponent::ball(sample_center, 0.5 * d, 0.5 * min.saturated_mass)});
    const LimitParams free_params = LimitParams::unnormalized(1e9, nuc.charge_fractions());
    const double J_rho = coulomb_self_energy(min.measure);
    const double square_residual = std::abs(continuum_energy(sample, nuc, free_params).value() -
                                            (coulomb_norm(min.measure, sample) - J_rho));
    CompositeMeasure sample_eq;
    for (auto c : sample.components()) {
        c.mass = min.measure.total_mass();
        sample_eq.add(c);
    }
    const double closed = coulomb_norm(min.measure, sample_eq);
    const double fourier = fourier_energy(min.measure, sample_eq).value();
    const double fourier_rel = std::abs(fourier - closed) / std::max(1e-300, std::abs(closed));

    json j;
    j["lambda"] = lambda;
    j["e"] = min.energy;
    j["saturated_mass"] = min.saturated_mass;
    j["minimizer"] = json::parse(to_json(min.measure));
    j["cross_checks"] = {{"completing_square_residual", square_residual},
                         {"fourier_vs_closed_rel_err", fourier_rel}};
    write_file(out / "continuum.json", j.dump(2) + "\n");
    write_metadata(out / "continuum.meta.json", "continuum", cfg, cfg.value("seed", std::uint64_t{0}),
                   runtime::threads());
    std::printf("continuum: e(%.6g) = %.12g -> %s\n", lambda, min.energy,
                (out / "continuum.json").c_str());
    return 0;
}

int cmd_recover(const json& cfg, const fs::path& out) {
    const NuclearConfig nuc = load_nuclei(cfg, "recover");
    const CompositeMeasure target = composite_measure_from_json(require(cfg, "target", "recover").dump());
    const double lambda = cfg.value("lambda", target.total_mass());
    const LimitParams params(lambda, nuc.charge_fractions());
    std::vector<double> schedule;
    for (const auto& v : require(cfg, "Z_schedule", "recover")) schedule.push_back(v.get<double>());
    if (schedule.empty()) throw ConfigError("recover: Z_schedule must be nonempty");
    const double mesh_exponent = cfg.value("mesh_exponent", 1.0 / 6.0);
    const double h0 = cfg.value("h0", 0.5);
    const auto rows = recovery_sequence(target, nuc, params, schedule, mesh_exponent, h0);
    write_file(out / "recovery.csv", recovery_csv(rows));
    write_metadata(out / "recovery.meta.json", "recover", cfg, cfg.value("seed", std::uint64_t{0}),
                   runtime::threads());
    std::printf("recover: %zu rows, final gap %.6g -> %s\n", rows.size(),
                rows.back().energy_gap, (out / "recovery.csv").c_str());
    return 0;
}

int cmd_sweep(const json& cfg, const fs::path& out, bool energy, bool neutrality, bool saturation,
              bool instability) {
    const NuclearConfig nuc = load_nuclei(cfg, "sweep");
    const OptimizeOptions opts = optimizer_options(cfg);
    if (!energy && !neutrality && !saturation && !instability)
        throw ConfigError("sweep: select at least one of --energy --neutrality --saturation --instability");
    if (energy) {
        const auto schedule = int_schedule(cfg, "Z_schedule", "sweep --energy");
        const EnergySweepResult res = energy_sweep(nuc, schedule, opts);
        write_file(out / "energy_sweep.csv", res.table.csv());
        json extra = cfg;
        extra["rate_exponent"] = res.rate_exponent;
        write_metadata(out / "energy_sweep.meta.json", "sweep --energy", extra, opts.seed,
                       runtime::threads());
        std::printf("sweep --energy: final |gap| = %.6g -> %s\n", res.table.rows.back()[5],
                    (out / "energy_sweep.csv").c_str());
    }
    if (neutrality) {
        const auto schedule = int_schedule(cfg, "Z_schedule", "sweep --neutrality");
        const SweepTable table = neutrality_sweep(nuc, schedule, opts);
        write_file(out / "neutrality_sweep.csv", table.csv());
        write_metadata(out / "neutrality_sweep.meta.json", "sweep --neutrality", cfg, opts.seed,
                       runtime::threads());
        std::printf("sweep --neutrality: final max ratio dev = %.6g -> %s\n",
                    table.rows.back()[2], (out / "neutrality_sweep.csv").c_str());
    }
    if (saturation) {
        const int Z = require(cfg, "Z", "sweep --saturation").get<int>();
        const json arr = require(cfg, "lambda_schedule", "sweep --saturation");
        std::vector<double> lambdas;
        for (const auto& v : arr) lambdas.push_back(v.get<double>());
        if (lambdas.empty()) throw ConfigError("sweep --saturation: lambda_schedule must be nonempty");
        const SweepTable table = saturation_curve(nuc, Z, lambdas, opts);
        write_file(out / "saturation_curve.csv", table.csv());
        write_metadata(out / "saturation_curve.meta.json", "sweep --saturation", cfg, opts.seed,
                       runtime::threads());
        std::printf("sweep --saturation: %zu rows -> %s\n", table.rows.size(),
                    (out / "saturation_curve.csv").c_str());
    }
    if (instability) {
        const auto schedule = int_schedule(cfg, "Z_schedule", "sweep --instability");
        const SweepTable table = instability_sweep(nuc, schedule, opts);
        write_file(out / "instability_sweep.csv", table.csv());
        write_metadata(out / "instability_sweep.meta.json", "sweep --instability", cfg, opts.seed,
                       runtime::threads());
        std::printf("sweep --instability: final ratio = %.6g -> %s\n", table.rows.back()[2],
                    (out / "instability_sweep.csv").c_str());
    }
    return 0;
}

int cmd_verify(std::uint64_t seed) {
    const auto checks = run_verification(seed);
    bool all = true;
    for (const auto& c : checks) {
        std::printf("%-45s %s  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.detail.c_str());
        all = all && c.passed;
    }
    std::printf("verify: %zu checks, %s\n", checks.size(), all ? "all passed" : "FAILURES");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hard-core Coulomb screening laboratory"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out";
    int threads = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--threads", threads, "worker threads (default: hardware)");
    app.add_option("--out", out_dir, "output directory");

    auto* sub_minimize = app.add_subcommand("minimize", "multistart hard-core minimization");
    auto* sub_continuum = app.add_subcommand("continuum", "explicit continuum minimizer and checks");
    auto* sub_recover = app.add_subcommand("recover", "recovery-sequence experiment");
    auto* sub_sweep = app.add_subcommand("sweep", "neutrality / energy / saturation / instability sweeps");
    auto* sub_verify = app.add_subcommand("verify", "run the invariant battery");
    for (auto* sub : {sub_minimize, sub_continuum, sub_recover, sub_sweep, sub_verify})
        sub->fallthrough();
    bool f_energy = false, f_neutrality = false, f_saturation = false, f_instability = false;
    sub_sweep->add_flag("--energy", f_energy, "energy convergence sweep");
    sub_sweep->add_flag("--neutrality", f_neutrality, "per-nucleus neutrality sweep");
    sub_sweep->add_flag("--saturation", f_saturation, "filling-factor saturation curve");
    sub_sweep->add_flag("--instability", f_instability, "escape-threshold proxy sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (threads > 0) runtime::set_threads(threads);

    try {
        if (sub_verify->parsed()) {
            std::uint64_t seed = 0;
            if (!config_path.empty()) seed = load_json(config_path).value("seed", std::uint64_t{0});
            return cmd_verify(seed);
        }
        if (config_path.empty()) throw ConfigError("--config is required for this subcommand");
        const json cfg = load_json(config_path);
        const fs::path out(out_dir);
        fs::create_directories(out);
        if (sub_minimize->parsed()) return cmd_minimize(cfg, out);
        if (sub_continuum->parsed()) return cmd_continuum(cfg, out);
        if (sub_recover->parsed()) return cmd_recover(cfg, out);
        if (sub_sweep->parsed())
            return cmd_sweep(cfg, out, f_energy, f_neutrality, f_saturation, f_instability);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return 1;
    }
    return 2;
}
