#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return SCREENING_CLI_PATH; }
const fs::path config_dir() { return fs::path(SCREENING_CONFIG_DIR); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("screening_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("continuum subcommand emits the closed-form energy") {
    TempDir tmp;
    spit(tmp.path / "run.json",
         "{\"nuclei_file\": \"" + (config_dir() / "atom.json").string() + "\", \"lambda\": 1.0}");
    const int rc = run_cli("continuum --config " + (tmp.path / "run.json").string() + " --out " +
                           (tmp.path / "out").string());
    CHECK(rc == 0);
    const auto j = nlohmann::json::parse(slurp(tmp.path / "out" / "continuum.json"));
    CHECK(j.at("e").get<double>() == doctest::Approx(-0.5));
    CHECK(j.at("saturated_mass").get<double>() == 1.0);
    CHECK(j.at("cross_checks").at("completing_square_residual").get<double>() <= 1e-9);
    CHECK(j.at("cross_checks").at("fourier_vs_closed_rel_err").get<double>() <= 1e-3);
}

TEST_CASE("minimize subcommand writes result and stats") {
    TempDir tmp;
    spit(tmp.path / "run.json",
         "{\"nuclei_file\": \"" + (config_dir() / "atom.json").string() +
             "\", \"N\": 2, \"seed\": 0, "
             "\"optimizer\": {\"restarts\": 4, \"max_iterations\": 600}}");
    const int rc = run_cli("minimize --config " + (tmp.path / "run.json").string() + " --out " +
                           (tmp.path / "out").string() + " --threads 2");
    CHECK(rc == 0);
    const auto j = nlohmann::json::parse(slurp(tmp.path / "out" / "minimize_result.json"));
    // atom.json carries Z = 1; two electrons on the unit sphere minimize at
    // antipodes: -2/1 + 1/2
    CHECK(j.at("energy").at("total").get<double>() == doctest::Approx(-1.5).epsilon(1e-8));
    CHECK(j.at("absorbed").get<bool>());
    CHECK(fs::exists(tmp.path / "out" / "screening_stats.json"));
    CHECK(fs::exists(tmp.path / "out" / "minimize_result.meta.json"));
}

TEST_CASE("identical configs produce byte-identical artifacts") {
    TempDir tmp;
    spit(tmp.path / "run.json", "{\"nuclei_file\": \"" + (config_dir() / "atom.json").string() +
                                    "\", \"target\": {\"components\": [{\"kind\": \"ball\", "
                                    "\"center\": [3, 0, 0], \"radius\": 1.0, \"mass\": 1.0}]}, "
                                    "\"lambda\": 1.0, \"Z_schedule\": [50], "
                                    "\"mesh_exponent\": 0.16666666666666666}");
    REQUIRE(run_cli("recover --config " + (tmp.path / "run.json").string() + " --out " +
                    (tmp.path / "a").string()) == 0);
    REQUIRE(run_cli("recover --config " + (tmp.path / "run.json").string() + " --out " +
                    (tmp.path / "b").string() + " --threads 1") == 0);
    CHECK(slurp(tmp.path / "a" / "recovery.csv") == slurp(tmp.path / "b" / "recovery.csv"));
    const std::string csv = slurp(tmp.path / "a" / "recovery.csv");
    CHECK(csv.rfind("Z,N,h,a,I_NZ,I_target,energy_gap,weakstar_err\n", 0) == 0);
}

TEST_CASE("sweep subcommand with the energy flag") {
    TempDir tmp;
    spit(tmp.path / "run.json",
         "{\"nuclei_file\": \"" + (config_dir() / "atom.json").string() +
             "\", \"Z_schedule\": [4, 8], \"seed\": 1, "
             "\"optimizer\": {\"restarts\": 4, \"max_iterations\": 600}}");
    const int rc = run_cli("sweep --energy --config " + (tmp.path / "run.json").string() +
                           " --out " + (tmp.path / "out").string());
    CHECK(rc == 0);
    const std::string csv = slurp(tmp.path / "out" / "energy_sweep.csv");
    CHECK(csv.rfind("Z,N,V_over_N2,limit,gap,abs_gap\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
}

TEST_CASE("config errors exit with status 2 and a located diagnostic") {
    TempDir tmp;
    SUBCASE("malformed json") {
        spit(tmp.path / "bad.json", "{\n  \"nuclei_file\": \n}");
        CHECK(run_cli("continuum --config " + (tmp.path / "bad.json").string()) == 2);
    }
    SUBCASE("missing file") {
        CHECK(run_cli("continuum --config " + (tmp.path / "absent.json").string()) == 2);
    }
    SUBCASE("missing required field") {
        spit(tmp.path / "incomplete.json", "{\"lambda\": 1.0}");
        CHECK(run_cli("continuum --config " + (tmp.path / "incomplete.json").string()) == 2);
    }
    SUBCASE("missing config flag") { CHECK(run_cli("minimize") == 2); }
    SUBCASE("sweep without a kind") {
        spit(tmp.path / "s.json", "{\"nuclei_file\": \"" + (config_dir() / "atom.json").string() +
                                      "\", \"Z_schedule\": [4]}");
        CHECK(run_cli("sweep --config " + (tmp.path / "s.json").string()) == 2);
    }
}
