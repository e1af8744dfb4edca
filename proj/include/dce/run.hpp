#pragma once

#include "dce/moebius.hpp"
#include "dce/observables.hpp"
#include "dce/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dce {

struct OutputSpec {
    std::string type; // energy | profile | spectrum | beta | sum_rule |
                      // symmetry_check | phase | density2d
    std::string path; // relative to the output directory; "" = summary only
    int samples = 1024;
};

struct SweepSpec {
    std::string parameter; // periods | delta_L | k_drive | L
    std::vector<double> values;
};

struct RunConfig {
    // trajectory
    std::string kind = "static"; // static | sinusoidal | lawwu
    double L = M_PI;
    double delta_L = 0.0;
    int k_drive = 1;
    int periods = 1; // T_motion in units of the drive period

    std::vector<double> eval_times;
    std::optional<SweepSpec> sweep;

    // tolerances
    double tol_moore = 0.0;        // default 1e-10 * L
    double quad_tol = 0.0;         // default 1e-10 * omega
    double spectrum_rel_tol = 1e-6;
    int spectrum_l0 = 32;
    int spectrum_l_cap = 512;

    std::vector<OutputSpec> outputs;
    std::optional<MoebiusElement> seed_moebius;
    int workers = 1;

    std::string raw_text; // original config text, hashed into the summary
};

// Parses and structurally validates a JSON config. Throws parameter_error
// with a machine-readable message on any defect.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Semantic validation (trajectory invariants, sweep points, eval times).
// Returns human-readable violations; empty means runnable.
std::vector<std::string> validate_config(const RunConfig& cfg);

// Executes the run (all sweep points), writing artifact files and
// summary.json under out_dir. Returns a process exit status:
// 0 ok, 2 config error, 3 numerical error.
int run(const RunConfig& cfg, const std::string& out_dir, bool quiet = false);

// CSV emitters (17 significant digits, stable layouts).
void emit_profile_csv(const EnergyProfile& profile, const std::string& path);

} // namespace dce
