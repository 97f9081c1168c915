#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfmix/driver/config.hpp"

namespace selfmix::driver {

/// Process exit codes shared by all commands.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config_error = 2, exit_numerical_abort = 3 };

struct CommandResult {
    int exit_code = exit_ok;
    std::filesystem::path out_dir;
    nlohmann::json summary;
};

struct RunOverrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
};

/// Applies command-line overrides to a parsed config.
void apply_overrides(RunConfig& config, const RunOverrides& overrides);

/// Runs a configured simulation and writes config.json, rho_t<step>.csv
/// snapshots (and .pgm heatmaps), moments.csv, ledger.csv and summary.json
/// into config.output.dir. summary.json is written on abort as well.
CommandResult simulate(const RunConfig& config, std::ostream& log);

/// Loads the config file, applies overrides and simulates. Config problems
/// are reported on `log` with exit code 2.
CommandResult simulate_file(const std::filesystem::path& config_path, const RunOverrides& overrides,
                            std::ostream& log);

/// Physical box [lo, hi) per axis; "x0:x1" or "x0:x1,y0:y1".
struct Region {
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};
    int dim = 1;

    bool contains(const Vec& x) const noexcept;
};

Region parse_region(const std::string& text, int dim);

/// Evolves one tag per region alongside the simulation and writes
/// portion_<k>.csv time series, support_<k>_t<step>.csv cell lists,
/// overlap.csv (pairwise overlap measure per step) and portions.json.
CommandResult run_portions(const RunConfig& config, const std::vector<Region>& regions, std::ostream& log);

CommandResult portions_file(const std::filesystem::path& config_path, const std::vector<std::string>& regions,
                            const RunOverrides& overrides, std::ostream& log);

struct DiagnoseOptions {
    std::size_t localization_trials = 100;
    /// Adds a symmetric perturbation of this size (relative to the kernel
    /// peak) to every off-diagonal mass-mixer entry before checking.
    double inject_symmetric_defect = 0.0;
};

/// Re-checks a finished run directory: mass drift and impulse residual from
/// the ledger, positivity, mixer symmetrization and localization trials on
/// the last snapshot. Prints PASS/FAIL lines and writes diagnose.json.
/// Exit code 1 if any check fails, 2 if artifacts are missing.
CommandResult diagnose(const std::filesystem::path& run_dir, const DiagnoseOptions& options, std::ostream& out);

}  // namespace selfmix::driver
