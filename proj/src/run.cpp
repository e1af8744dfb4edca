#include "dce/run.hpp"
#include "dce/errors.hpp"
#include "dce/numerics.hpp"
#include "dce/particles.hpp"
#include "dce/phase.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dce {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

WallTrajectory make_trajectory(const RunConfig& cfg) {
    if (cfg.kind == "static") return WallTrajectory::make_static(cfg.L);
    if (cfg.kind == "sinusoidal")
        return WallTrajectory::make_sinusoidal(cfg.L, cfg.delta_L, cfg.k_drive,
                                               cfg.periods);
    if (cfg.kind == "lawwu")
        return WallTrajectory::make_lawwu(cfg.L, cfg.delta_L, cfg.k_drive,
                                          cfg.periods);
    throw parameter_error("config: unknown trajectory kind '" + cfg.kind + "'");
}

RunConfig apply_sweep_value(const RunConfig& base, const std::string& param,
                            double value) {
    RunConfig cfg = base;
    if (param == "periods")
        cfg.periods = static_cast<int>(std::llround(value));
    else if (param == "delta_L")
        cfg.delta_L = value;
    else if (param == "k_drive")
        cfg.k_drive = static_cast<int>(std::llround(value));
    else if (param == "L")
        cfg.L = value;
    else
        throw parameter_error("config: unknown sweep parameter '" + param + "'");
    return cfg;
}

bool wants_spectrum(const RunConfig& cfg) {
    for (const auto& o : cfg.outputs)
        if (o.type == "spectrum" || o.type == "beta" || o.type == "sum_rule"
            || o.type == "symmetry_check")
            return true;
    return false;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw error("cannot open output file " + p.string());
    return f;
}

void emit_phase_csv(const PhaseFunction& R, double lo, double hi, int n,
                    const std::filesystem::path& path) {
    auto f = open_out(path);
    f << "tau,R,Rdot,Rddot,Rdddot\n";
    for (int i = 0; i < n; ++i) {
        const double tau = lo + (hi - lo) * i / (n - 1);
        const PhaseJet j = R.jet(tau);
        f << fmt17(tau) << ',' << fmt17(j[0]) << ',' << fmt17(j[1]) << ','
          << fmt17(j[2]) << ',' << fmt17(j[3]) << '\n';
    }
}

void emit_spectrum_csv(const SpectrumResult& s, const std::filesystem::path& path) {
    auto f = open_out(path);
    f << "k,n_k\n";
    for (int k = 1; k <= s.l_max; ++k)
        f << k << ',' << fmt17(s.n_k[k - 1]) << '\n';
}

void emit_beta_csv(const SpectrumResult& s, const std::filesystem::path& path) {
    auto f = open_out(path);
    f << "k,l,re,im\n";
    for (int k = 1; k <= s.l_max; ++k)
        for (int l = 1; l <= s.l_max; ++l) {
            const auto& b = s.at(k, l);
            f << k << ',' << l << ',' << fmt17(b.real()) << ',' << fmt17(b.imag())
              << '\n';
        }
}

void emit_density2d_csv(const PhaseFunction& R, const WallTrajectory& traj,
                        double t0, int n, const std::filesystem::path& path) {
    auto f = open_out(path);
    f << "x,t,T00\n";
    const int nx = n, nt = n;
    const double L = traj.length();
    for (int it = 0; it < nt; ++it) {
        const double t = t0 + 2.0 * L * it / (nt - 1);
        const double Lt = traj.eval(t, 0);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = Lt * ix / (nx - 1);
            f << fmt17(x) << ',' << fmt17(t) << ','
              << fmt17(energy_density(R, x, t)) << '\n';
        }
    }
}

struct PointResult {
    double sweep_value = 0.0;
    bool has_sweep = false;
    ordered_json scalars;
};

PointResult run_point(const RunConfig& cfg, const std::filesystem::path& out_dir,
                      const std::string& prefix) {
    const WallTrajectory traj = make_trajectory(cfg);
    const double L = traj.length();
    const double omega = M_PI / L;
    const double tol_moore = cfg.tol_moore > 0 ? cfg.tol_moore : 1e-10 * L;
    const double quad_tol = cfg.quad_tol > 0 ? cfg.quad_tol : 1e-10 * omega;

    double t_max = traj.motion_duration();
    for (double t : cfg.eval_times) t_max = std::max(t_max, t);

    PhasePtr R = solve_phase(traj, t_max + L, tol_moore);
    const double residual = max_moore_residual(*R, traj, 1000, 42);

    PointResult pr;
    ordered_json& s = pr.scalars;
    s["max_moore_residual"] = residual;
    s["eval_times"] = cfg.eval_times;

    // Energies at every eval time.
    std::vector<double> e_tot, e_sub, e_schw;
    for (double t : cfg.eval_times) {
        auto rep = total_energy(*R, traj, t, quad_tol);
        e_tot.push_back(rep.E_total);
        e_sub.push_back(rep.E_subcasimir);
        e_schw.push_back(rep.E_schwarzian);
    }
    s["E_total"] = e_tot;
    s["E_subcasimir"] = e_sub;
    s["E_schwarzian"] = e_schw;

    std::optional<SpectrumResult> spec;
    if (wants_spectrum(cfg) && !cfg.eval_times.empty()) {
        spec = spectrum(*R, cfg.eval_times.front(), cfg.spectrum_l0,
                        cfg.spectrum_rel_tol, ExecutionPolicy::Parallel,
                        cfg.spectrum_l_cap);
        s["N_total"] = spec->N_total;
        s["l_max"] = spec->l_max;
        s["tail_estimate"] = spec->tail_estimate;
        s["truncated"] = spec->truncated;
    }

    for (const auto& o : cfg.outputs) {
        if (o.type == "energy") continue; // scalars already recorded
        if (o.type == "profile") {
            const double t = cfg.eval_times.empty() ? traj.motion_duration()
                                                    : cfg.eval_times.front();
            const double Lt = traj.eval(t, 0);
            auto prof = energy_profile(*R, t - Lt, t + Lt, o.samples, 16);
            emit_profile_csv(prof, (out_dir / (prefix + o.path)).string());
        } else if (o.type == "phase") {
            const double t = cfg.eval_times.empty() ? traj.motion_duration()
                                                    : cfg.eval_times.front();
            emit_phase_csv(*R, t - L, t + L, o.samples,
                           out_dir / (prefix + o.path));
        } else if (o.type == "spectrum") {
            emit_spectrum_csv(*spec, out_dir / (prefix + o.path));
        } else if (o.type == "beta") {
            emit_beta_csv(*spec, out_dir / (prefix + o.path));
        } else if (o.type == "density2d") {
            const double t = cfg.eval_times.empty() ? traj.motion_duration()
                                                    : cfg.eval_times.front();
            emit_density2d_csv(*R, traj, t, std::max(o.samples, 2),
                               out_dir / (prefix + o.path));
        } else if (o.type == "sum_rule") {
            EnergyReport rep;
            rep.E_total = e_tot.front();
            auto chk = sum_rule_check(*spec, rep);
            s["sum_rule_lhs"] = chk.lhs;
            s["sum_rule_rhs"] = chk.rhs;
            s["sum_rule_rel_err"] = chk.rel_err;
        } else if (o.type == "symmetry_check") {
            if (!cfg.seed_moebius)
                throw parameter_error("config: symmetry_check needs seed_moebius");
            auto comp = conformal_compose(R, *cfg.seed_moebius);
            const double t = cfg.eval_times.front();
            auto rep_c = total_energy(*comp, traj, t, quad_tol);
            const double e_rel = std::abs(rep_c.E_total - e_tot.front())
                                 / std::max(std::abs(e_tot.front()), omega / 24.0);
            auto nk1 = photon_numbers(*R, t, 16, 1e-9);
            auto nk2 = photon_numbers(*comp, t, 16, 1e-9);
            double nk_rel = 0.0;
            for (int k = 0; k < 16; ++k)
                nk_rel = std::max(nk_rel,
                                  std::abs(nk1[k] - nk2[k])
                                      / std::max({nk1[k], nk2[k], 1e-12}));
            s["symmetry_E_rel"] = e_rel;
            s["symmetry_nk_rel"] = nk_rel;
        } else {
            throw parameter_error("config: unknown output type '" + o.type + "'");
        }
    }
    return pr;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw parameter_error(std::string("config: JSON parse failure: ") + e.what());
    }
    RunConfig cfg;
    cfg.raw_text = text;
    try {
        const auto& tr = j.at("trajectory");
        cfg.kind = tr.at("kind").get<std::string>();
        cfg.L = tr.value("L", M_PI);
        cfg.delta_L = tr.value("delta_L", 0.0);
        cfg.k_drive = tr.value("k_drive", 1);
        cfg.periods = tr.value("periods", 1);
        cfg.eval_times = j.value("eval_times", std::vector<double>{});
        if (j.contains("sweep")) {
            SweepSpec sw;
            sw.parameter = j["sweep"].at("parameter").get<std::string>();
            sw.values = j["sweep"].at("values").get<std::vector<double>>();
            cfg.sweep = sw;
        }
        if (j.contains("tolerances")) {
            const auto& t = j["tolerances"];
            cfg.tol_moore = t.value("tol_moore", 0.0);
            cfg.quad_tol = t.value("quad_tol", 0.0);
            cfg.spectrum_rel_tol = t.value("spectrum_rel_tol", 1e-6);
            cfg.spectrum_l0 = t.value("spectrum_l0", 32);
            cfg.spectrum_l_cap = t.value("spectrum_l_cap", 512);
        }
        for (const auto& o : j.value("outputs", nlohmann::json::array())) {
            OutputSpec os;
            os.type = o.at("type").get<std::string>();
            os.path = o.value("path", os.type + ".csv");
            os.samples = o.value("samples", 1024);
            cfg.outputs.push_back(os);
        }
        if (j.contains("seed_moebius")) {
            const auto& m = j["seed_moebius"];
            cfg.seed_moebius = MoebiusElement(m.at("A").get<double>(),
                                              m.at("B").get<double>(),
                                              m.at("C").get<double>(),
                                              m.at("D").get<double>());
        }
        cfg.workers = j.value("workers", 1);
    } catch (const parameter_error&) {
        throw;
    } catch (const std::exception& e) {
        throw parameter_error(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parameter_error("config: cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
    std::vector<std::string> out;
    auto check_point = [&](const RunConfig& c, const std::string& label) {
        WallTrajectory traj = [&]() {
            try {
                return make_trajectory(c);
            } catch (const error& e) {
                out.push_back(label + e.what());
                return WallTrajectory::make_static(1.0);
            }
        }();
        for (const auto& v : traj.validate())
            out.push_back(label + "t=" + fmt17(v.t) + ": " + v.what);
        if (wants_spectrum(c)) {
            if (c.eval_times.empty())
                out.push_back(label + "spectrum outputs need eval_times");
            for (double t : c.eval_times)
                if (t <= traj.motion_duration())
                    out.push_back(label + "eval time " + fmt17(t)
                                  + " not past T_motion for spectrum output");
        }
    };
    try {
        if (cfg.sweep) {
            if (cfg.sweep->values.empty())
                out.push_back("sweep: empty value list");
            for (size_t i = 0; i < cfg.sweep->values.size(); ++i)
                check_point(apply_sweep_value(cfg, cfg.sweep->parameter,
                                              cfg.sweep->values[i]),
                            "sweep[" + std::to_string(i) + "]: ");
        } else {
            check_point(cfg, "");
        }
    } catch (const error& e) {
        out.push_back(e.what());
    }
    for (const auto& o : cfg.outputs) {
        static const char* known[] = {"energy",   "profile",        "spectrum",
                                      "beta",     "sum_rule",       "symmetry_check",
                                      "phase",    "density2d"};
        bool ok = false;
        for (const char* k : known) ok = ok || o.type == k;
        if (!ok) out.push_back("unknown output type '" + o.type + "'");
        if (o.type == "symmetry_check" && !cfg.seed_moebius)
            out.push_back("symmetry_check output needs seed_moebius");
    }
    return out;
}

void emit_profile_csv(const EnergyProfile& profile, const std::string& path) {
    if (profile.tau.empty())
        throw parameter_error("emit_profile_csv: empty profile");
    auto f = open_out(path);
    f << "tau,rho\n";
    for (size_t i = 0; i < profile.tau.size(); ++i)
        f << fmt17(profile.tau[i]) << ',' << fmt17(profile.rho[i]) << '\n';
}

int run(const RunConfig& cfg, const std::string& out_dir, bool quiet) {
    auto problems = validate_config(cfg);
    if (!problems.empty()) {
        for (const auto& p : problems) std::fprintf(stderr, "config: %s\n", p.c_str());
        return 2;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    std::vector<RunConfig> points;
    std::vector<double> sweep_values;
    if (cfg.sweep) {
        for (double v : cfg.sweep->values) {
            points.push_back(apply_sweep_value(cfg, cfg.sweep->parameter, v));
            sweep_values.push_back(v);
        }
    } else {
        points.push_back(cfg);
    }

    std::vector<PointResult> results(points.size());
    std::string failure;
    try {
        for (size_t i = 0; i < points.size(); ++i) {
            const std::string prefix =
                cfg.sweep ? ("swp" + std::to_string(i) + "_") : "";
            results[i] = run_point(points[i], out_dir, prefix);
            if (cfg.sweep) {
                results[i].has_sweep = true;
                results[i].sweep_value = sweep_values[i];
            }
            if (!quiet)
                std::fprintf(stderr, "point %zu/%zu done\n", i + 1, points.size());
        }
    } catch (const parameter_error& e) {
        std::fprintf(stderr, "config: %s\n", e.what());
        return 2;
    } catch (const error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }

    ordered_json summary;
    {
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx",
                      (unsigned long long)num::fnv1a64(cfg.raw_text));
        summary["config_hash"] = hex;
    }
    summary["tolerances"] = {
        {"tol_moore", cfg.tol_moore},
        {"quad_tol", cfg.quad_tol},
        {"spectrum_rel_tol", cfg.spectrum_rel_tol},
    };
    summary["results"] = ordered_json::array();
    for (const auto& r : results) {
        ordered_json entry = r.scalars;
        if (r.has_sweep) {
            ordered_json keyed;
            keyed["sweep_value"] = r.sweep_value;
            keyed.update(entry);
            summary["results"].push_back(keyed);
        } else {
            summary["results"].push_back(entry);
        }
    }
    auto f = open_out(std::filesystem::path(out_dir) / "summary.json");
    f << summary.dump(2) << '\n';
    return 0;
}

} // namespace dce
