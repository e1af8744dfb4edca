#include "dce/errors.hpp"
#include "dce/run.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dce;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("dce_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

const char* kStaticCfg = R"({
  "trajectory": {"kind": "static", "L": 3.141592653589793},
  "eval_times": [10.0],
  "outputs": [{"type": "energy"}, {"type": "profile", "path": "profile.csv",
               "samples": 512}]
})";

const char* kStaticAllCfg = R"({
  "trajectory": {"kind": "static", "L": 3.141592653589793},
  "eval_times": [10.0],
  "outputs": [{"type": "phase", "path": "phase.csv", "samples": 64},
              {"type": "density2d", "path": "density.csv", "samples": 8},
              {"type": "spectrum", "path": "spectrum.csv"},
              {"type": "beta", "path": "beta.csv"},
              {"type": "sum_rule"}]
})";

} // namespace

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_config("{not json"), parameter_error);
    CHECK_THROWS_AS(parse_config("{}"), parameter_error); // no trajectory
    CHECK_THROWS_AS(parse_config(R"({"trajectory": {"L": 1.0}})"),
                    parameter_error); // no kind
}

TEST_CASE("validate_config reports semantic problems") {
    auto cfg = parse_config(R"({
      "trajectory": {"kind": "sinusoidal", "L": 3.141592653589793,
                      "delta_L": 1.6, "k_drive": 2, "periods": 4},
      "eval_times": [1.0],
      "outputs": [{"type": "spectrum"}]
    })");
    auto problems = validate_config(cfg);
    CHECK(problems.size() >= 2); // superluminal + eval time inside motion
}

TEST_CASE("static run writes the Casimir energy into the summary") {
    auto dir = fresh_dir("static");
    auto cfg = parse_config(kStaticCfg);
    REQUIRE(run(cfg, dir.string(), true) == 0);
    auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    const double E = j["results"][0]["E_total"][0].get<double>();
    CHECK(std::abs(E - (-1.0 / 24.0)) < 1e-12);
    CHECK(j["results"][0]["max_moore_residual"].get<double>() < 1e-12);

    // Profile file: constant rho = -pi/48L^2.
    std::istringstream csv(slurp(dir / "profile.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "tau,rho");
    const double want = -M_PI / (48.0 * M_PI * M_PI);
    int rows = 0;
    while (std::getline(csv, line)) {
        const auto comma = line.find(',');
        const double rho = std::strtod(line.c_str() + comma + 1, nullptr);
        CHECK(std::abs(rho - want) < 1e-15);
        ++rows;
    }
    CHECK(rows == 512);
}

TEST_CASE("remaining output types produce well-formed files") {
    auto dir = fresh_dir("all_outputs");
    auto cfg = parse_config(kStaticAllCfg);
    REQUIRE(run(cfg, dir.string(), true) == 0);

    std::istringstream phase_csv(slurp(dir / "phase.csv"));
    std::string line;
    std::getline(phase_csv, line);
    CHECK(line == "tau,R,Rdot,Rddot,Rdddot");
    int rows = 0;
    while (std::getline(phase_csv, line)) ++rows;
    CHECK(rows == 64);

    std::istringstream dens_csv(slurp(dir / "density.csv"));
    std::getline(dens_csv, line);
    CHECK(line == "x,t,T00");
    rows = 0;
    double worst = 0.0;
    const double want = -2.0 * M_PI / (48.0 * M_PI * M_PI);
    while (std::getline(dens_csv, line)) {
        const auto c2 = line.rfind(',');
        worst = std::max(worst,
                         std::abs(std::strtod(line.c_str() + c2 + 1, nullptr) - want));
        ++rows;
    }
    CHECK(rows == 8 * 8);
    CHECK(worst < 1e-15);

    std::istringstream spec_csv(slurp(dir / "spectrum.csv"));
    std::getline(spec_csv, line);
    CHECK(line == "k,n_k");
    std::istringstream beta_csv(slurp(dir / "beta.csv"));
    std::getline(beta_csv, line);
    CHECK(line == "k,l,re,im");

    auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["results"][0]["sum_rule_rel_err"].get<double>() < 1e-10);
    CHECK(j["results"][0]["N_total"].get<double>() < 1e-12);
}

TEST_CASE("profile CSV round-trips bit-exactly at 17 digits") {
    EnergyProfile prof;
    prof.L = M_PI;
    prof.tau = {0.1, 0.2, 1.0 / 3.0, M_PI};
    prof.rho = {-1.0 / 24.0, 3.5e-17, -0.123456789012345678, 2.0 / 7.0};
    auto dir = fresh_dir("roundtrip");
    const auto path = dir / "p.csv";
    emit_profile_csv(prof, path.string());
    std::istringstream csv(slurp(path));
    std::string line;
    std::getline(csv, line);
    for (size_t i = 0; i < prof.tau.size(); ++i) {
        REQUIRE(std::getline(csv, line));
        const auto comma = line.find(',');
        const double tau = std::strtod(line.substr(0, comma).c_str(), nullptr);
        const double rho = std::strtod(line.c_str() + comma + 1, nullptr);
        CHECK(tau == prof.tau[i]);
        CHECK(rho == prof.rho[i]);
    }
    EnergyProfile empty;
    CHECK_THROWS_AS(emit_profile_csv(empty, (dir / "e.csv").string()),
                    parameter_error);
    CHECK(!fs::exists(dir / "e.csv"));
}

TEST_CASE("identical configs produce byte-identical outputs") {
    auto cfg = parse_config(kStaticCfg);
    auto d1 = fresh_dir("det1");
    auto d2 = fresh_dir("det2");
    REQUIRE(run(cfg, d1.string(), true) == 0);
    REQUIRE(run(cfg, d2.string(), true) == 0);
    CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
    CHECK(slurp(d1 / "profile.csv") == slurp(d2 / "profile.csv"));
}

TEST_CASE("sweep over drive duration follows the cosh growth law") {
    // E(T) = -4 w/24 + 3 w/24 cosh(omega_k T dL / L) for the k=2 drive;
    // the eval time sits past every motion window (E is conserved there).
    auto cfg = parse_config(R"({
      "trajectory": {"kind": "sinusoidal", "L": 3.141592653589793,
                      "delta_L": 0.031415926535897934, "k_drive": 2, "periods": 2},
      "eval_times": [100.0],
      "sweep": {"parameter": "periods", "values": [10, 20, 30]},
      "outputs": [{"type": "energy"}]
    })");
    auto dir = fresh_dir("sweep");
    REQUIRE(run(cfg, dir.string(), true) == 0);
    auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    REQUIRE(j["results"].size() == 3);
    double prev = -1.0;
    for (const auto& r : j["results"]) {
        const double periods = r["sweep_value"].get<double>();
        const double T = periods * M_PI; // drive period pi for k=2, L=pi
        const double E = r["E_total"][0].get<double>();
        const double want = (-4.0 + 3.0 * std::cosh(2.0 * T * 0.01)) / 24.0;
        CHECK(std::abs(E - want) < 0.02); // asymptotic law, transient band
        CHECK(E > prev);
        prev = E;
    }
}

TEST_CASE("lawwu sweep grows quadratically with the drive duration") {
    auto cfg = parse_config(R"({
      "trajectory": {"kind": "lawwu", "L": 3.141592653589793,
                      "delta_L": 0.031415926535897934, "k_drive": 2, "periods": 2},
      "eval_times": [140.0],
      "sweep": {"parameter": "periods", "values": [10, 20, 40]},
      "outputs": [{"type": "energy"}]
    })");
    auto dir = fresh_dir("lawwu_sweep");
    REQUIRE(run(cfg, dir.string(), true) == 0);
    auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    std::vector<double> ex;
    for (const auto& r : j["results"])
        ex.push_back(r["E_total"][0].get<double>() + 1.0 / 24.0);
    REQUIRE(ex.size() == 3);
    // log-log slope between successive duration doublings.
    const double s1 = std::log(ex[1] / ex[0]) / std::log(2.0);
    const double s2 = std::log(ex[2] / ex[1]) / std::log(2.0);
    CHECK(std::abs(s1 - 2.0) < 0.1);
    CHECK(std::abs(s2 - 2.0) < 0.1);
}

#ifdef DCE_CLI_PATH
TEST_CASE("binary exit codes: 0 ok, 2 config error") {
    auto dir = fresh_dir("exit");
    const std::string bin = DCE_CLI_PATH;
    spit(dir / "ok.json", kStaticCfg);
    spit(dir / "bad.json", "{broken");
    spit(dir / "invalid.json", R"({
      "trajectory": {"kind": "sinusoidal", "L": 3.141592653589793,
                      "delta_L": 1.6, "k_drive": 2, "periods": 4},
      "eval_times": [1.0],
      "outputs": [{"type": "spectrum"}]
    })");

    auto run_cli = [&](const std::string& args) {
        const std::string cmd = bin + " " + args + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(run_cli("run --config " + (dir / "ok.json").string() + " --out "
                  + (dir / "out").string() + " --quiet") == 0);
    CHECK(run_cli("run --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("validate --config " + (dir / "invalid.json").string()) == 2);
    CHECK(run_cli("validate --config " + (dir / "ok.json").string()) == 0);
    // sweep subcommand demands a sweep axis.
    CHECK(run_cli("sweep --config " + (dir / "ok.json").string()) == 2);
}
#endif
