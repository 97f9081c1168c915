#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "selfmix/kinetic_solver.hpp"

namespace selfmix::driver {

/// Invalid or inconsistent run configuration. The message starts with the
/// offending key path, e.g. "params.kappa: must be positive".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

enum class Scenario { two_stream, gaussian_blob, laminar_limit, custom };

struct GridSpec {
    int dim = 1;
    std::array<std::size_t, 2> nx{64, 64};
    /// Defaults to 1 / nx[0] (unit domain along x).
    double h = 0.0;
    Boundary boundary = Boundary::periodic;
};

struct VelocitySpec {
    double radius = 1.0;
    int nodes_per_axis = 8;
};

enum class BPreset { zero, one };

struct ParamsSpec {
    double D = 1.0;
    double E = 0.0;
    /// Resolved κ: either given directly or from the (delta, epsilon) pair.
    double kappa = 1.0;
    std::optional<double> delta;
    std::optional<double> epsilon;
    Vec g{0.0, 0.0};
    BPreset b_preset = BPreset::zero;
    double zero_angle = 1.0;
};

struct OutputSpec {
    std::string dir = "run";
    std::size_t every_n_steps = 10;
    bool csv = true;
    bool pgm = false;
};

struct RunConfig {
    GridSpec grid;
    VelocitySpec velocity;
    ParamsSpec params;
    SolverConfig solver;
    Scenario scenario = Scenario::gaussian_blob;
    std::string init_file;
    double tau_supp = 1e-6;
    std::uint64_t seed = 0;
    OutputSpec output;
};

/// Parses and validates a JSON config. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Fully resolved config, defaults included, in the input schema.
nlohmann::json to_json(const RunConfig& config);

std::string to_string(Scenario scenario);

/// Grids and model parameters described by a config. For laminar_limit the
/// mixing strength is zero while κ still scales the moments.
Problem make_problem(const RunConfig& config);

/// Solver settings actually used (laminar_limit pins a Courant-one fixed step).
SolverConfig effective_solver_config(const RunConfig& config, const Problem& problem);

/// Index of the node carried by the laminar_limit scenario: the fastest node
/// moving along +x with zero y-component.
std::size_t laminar_node(const VelocityGrid& velocity);

}  // namespace selfmix::driver
