#include "dce/errors.hpp"
#include "dce/run.hpp"

#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv) {
    CLI::App app{"dce: vacuum energy and photon spectra in a vibrating 1-D cavity"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool quiet = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--quiet", quiet, "suppress progress messages");
    };

    auto* cmd_run = app.add_subcommand("run", "execute a configured run");
    auto* cmd_validate =
        app.add_subcommand("validate", "check a config without running it");
    auto* cmd_sweep =
        app.add_subcommand("sweep", "execute a run with a required sweep axis");
    add_common(cmd_run);
    add_common(cmd_validate);
    add_common(cmd_sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        dce::RunConfig cfg = dce::load_config(config_path);
        if (cmd_validate->parsed()) {
            auto problems = dce::validate_config(cfg);
            for (const auto& p : problems)
                std::fprintf(stderr, "config: %s\n", p.c_str());
            if (problems.empty() && !quiet) std::printf("config ok\n");
            return problems.empty() ? 0 : 2;
        }
        if (cmd_sweep->parsed() && !cfg.sweep) {
            std::fprintf(stderr, "config: sweep subcommand needs a sweep axis\n");
            return 2;
        }
        return dce::run(cfg, out_dir, quiet);
    } catch (const dce::parameter_error& e) {
        std::fprintf(stderr, "config: %s\n", e.what());
        return 2;
    } catch (const dce::error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}
