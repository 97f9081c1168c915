#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selfmix/driver/commands.hpp"

int main(int argc, char** argv) {
    using namespace selfmix::driver;

    CLI::App app{"selfmix: self-mixing kinetic turbulence simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    auto* sim = app.add_subcommand("simulate", "run a configured simulation");
    sim->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    auto* sim_out = sim->add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* sim_seed = sim->add_option("--seed", seed, "random seed (overrides seed)");

    std::vector<std::string> regions;
    auto* por = app.add_subcommand("portions", "track fluid portions seeded in regions");
    por->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    por->add_option("--region", regions, "region x0:x1[,y0:y1], repeatable")->required()->take_all();
    auto* por_out = por->add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* por_seed = por->add_option("--seed", seed, "random seed (overrides seed)");

    std::string run_dir;
    DiagnoseOptions diag;
    auto* dia = app.add_subcommand("diagnose", "re-check a finished run directory");
    dia->add_option("run_dir", run_dir, "run directory")->required();
    dia->add_option("--trials", diag.localization_trials, "localization trials");
    dia->add_option("--inject-symmetric-defect", diag.inject_symmetric_defect)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    auto overrides = [&](CLI::Option* out, CLI::Option* s) {
        RunOverrides o;
        if (out->count() > 0) o.out = out_dir;
        if (s->count() > 0) o.seed = seed;
        return o;
    };

    try {
        if (*sim) {
            const auto r = simulate_file(config_path, overrides(sim_out, sim_seed), std::cerr);
            if (r.exit_code == exit_ok) std::cout << "run written to " << r.out_dir.string() << '\n';
            return r.exit_code;
        }
        if (*por) {
            const auto r = portions_file(config_path, regions, overrides(por_out, por_seed), std::cerr);
            if (r.exit_code == exit_ok) std::cout << "portions written to " << r.out_dir.string() << '\n';
            return r.exit_code;
        }
        return diagnose(run_dir, diag, std::cout).exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_check_failed;
    }
}
