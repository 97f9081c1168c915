#include "selfmix/driver/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace selfmix::driver {

using nlohmann::json;

namespace {

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(join(path, key), "unknown key");
    }
}

double number(const json& obj, const std::string& path, std::string_view key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(std::string(key));
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(join(path, key), "must be finite");
    return d;
}

long long integer(const json& obj, const std::string& path, std::string_view key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(std::string(key));
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v.get<long long>();
}

std::string text(const json& obj, const std::string& path, std::string_view key, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(std::string(key));
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

void parse_grid(const json& j, RunConfig& c) {
    const std::string p = "grid";
    check_keys(j, p, {"dim", "nx", "h", "boundary"});
    const auto dim = integer(j, p, "dim", 1);
    if (dim != 1 && dim != 2) throw ConfigError("grid.dim", "must be 1 or 2");
    c.grid.dim = static_cast<int>(dim);

    if (j.contains("nx")) {
        const auto& nx = j.at("nx");
        auto cells = [&](const json& v, const std::string& key) -> std::size_t {
            if (!v.is_number_integer() || v.get<long long>() < 4) {
                throw ConfigError(key, "cells per axis must be an integer >= 4");
            }
            return static_cast<std::size_t>(v.get<long long>());
        };
        if (nx.is_array()) {
            if (nx.size() != static_cast<std::size_t>(c.grid.dim)) {
                throw ConfigError("grid.nx", "expected one entry per dimension");
            }
            for (std::size_t a = 0; a < nx.size(); ++a) c.grid.nx[a] = cells(nx[a], "grid.nx[" + std::to_string(a) + "]");
        } else {
            c.grid.nx[0] = c.grid.nx[1] = cells(nx, "grid.nx");
        }
    }
    if (c.grid.dim == 1) c.grid.nx[1] = 1;
    c.grid.h = number(j, p, "h", 1.0 / static_cast<double>(c.grid.nx[0]));
    if (!(c.grid.h > 0.0)) throw ConfigError("grid.h", "must be positive");

    const auto boundary = text(j, p, "boundary", "periodic");
    if (boundary == "periodic") {
        c.grid.boundary = Boundary::periodic;
    } else if (boundary == "outflow") {
        c.grid.boundary = Boundary::outflow;
    } else {
        throw ConfigError("grid.boundary", "expected \"periodic\" or \"outflow\"");
    }
}

void parse_velocity(const json& j, RunConfig& c) {
    const std::string p = "velocity";
    check_keys(j, p, {"radius", "nodes_per_axis"});
    c.velocity.radius = number(j, p, "radius", c.velocity.radius);
    if (!(c.velocity.radius > 0.0)) throw ConfigError("velocity.radius", "must be positive");
    const auto n = integer(j, p, "nodes_per_axis", c.velocity.nodes_per_axis);
    if (n < 1 || n > 4096) throw ConfigError("velocity.nodes_per_axis", "must lie in [1, 4096]");
    c.velocity.nodes_per_axis = static_cast<int>(n);
}

void parse_params(const json& j, RunConfig& c) {
    const std::string p = "params";
    check_keys(j, p, {"D", "E", "kappa", "delta", "epsilon", "g", "b_preset", "zero_angle"});
    auto& q = c.params;
    q.D = number(j, p, "D", q.D);
    if (!(q.D > 0.0)) throw ConfigError("params.D", "must be positive");
    q.E = number(j, p, "E", q.E);
    if (q.E < 0.0) throw ConfigError("params.E", "must be nonnegative");

    const bool has_kappa = j.contains("kappa");
    const bool has_pair = j.contains("delta") || j.contains("epsilon");
    if (has_kappa && has_pair) {
        throw ConfigError("params.kappa", "kappa and (delta, epsilon) are mutually exclusive");
    }
    if (has_kappa) {
        q.kappa = number(j, p, "kappa", 1.0);
        if (!(q.kappa > 0.0)) throw ConfigError("params.kappa", "must be positive");
    } else if (has_pair) {
        if (!j.contains("delta") || !j.contains("epsilon")) {
            throw ConfigError("params.delta", "delta and epsilon must be given together");
        }
        q.delta = number(j, p, "delta", 0.0);
        q.epsilon = number(j, p, "epsilon", 0.0);
        if (!(*q.epsilon > 0.0)) throw ConfigError("params.epsilon", "must be positive");
        if (!(*q.delta > 0.0)) throw ConfigError("params.delta", "must be positive (kappa would vanish)");
        q.kappa = kappa_from_scales(*q.delta, *q.epsilon);
    }

    if (j.contains("g")) {
        const auto& g = j.at("g");
        if (!g.is_array() || g.size() != static_cast<std::size_t>(c.grid.dim)) {
            throw ConfigError("params.g", "expected an array with one entry per dimension");
        }
        for (std::size_t a = 0; a < g.size(); ++a) {
            if (!g[a].is_number()) throw ConfigError("params.g", "expected numbers");
            q.g[a] = g[a].get<double>();
        }
    }
    const auto b = text(j, p, "b_preset", "zero");
    if (b == "zero") {
        q.b_preset = BPreset::zero;
    } else if (b == "one") {
        q.b_preset = BPreset::one;
    } else {
        throw ConfigError("params.b_preset", "expected \"zero\" or \"one\"");
    }
    q.zero_angle = number(j, p, "zero_angle", q.zero_angle);
    if (q.zero_angle < 0.0 || q.zero_angle > 1.0) throw ConfigError("params.zero_angle", "must lie in [0, 1]");
}

void parse_solver(const json& j, RunConfig& c) {
    const std::string p = "solver";
    check_keys(j, p, {"integrator", "t_end", "dt_policy", "dt", "cfl_advection", "cfl_diffusion", "cfl_mixing"});
    auto& s = c.solver;
    const auto integrator = text(j, p, "integrator", "euler");
    if (integrator == "euler") {
        s.integrator = Integrator::euler;
    } else if (integrator == "rk2") {
        s.integrator = Integrator::rk2;
    } else {
        throw ConfigError("solver.integrator", "expected \"euler\" or \"rk2\"");
    }
    s.t_end = number(j, p, "t_end", s.t_end);
    if (s.t_end < 0.0) throw ConfigError("solver.t_end", "must be nonnegative");

    const auto policy = text(j, p, "dt_policy", "auto");
    if (policy == "auto") {
        s.dt_policy = DtPolicy::auto_cfl;
        if (j.contains("dt")) throw ConfigError("solver.dt", "only allowed with dt_policy \"fixed\"");
    } else if (policy == "fixed") {
        s.dt_policy = DtPolicy::fixed;
        if (!j.contains("dt")) throw ConfigError("solver.dt", "required with dt_policy \"fixed\"");
        s.fixed_dt = number(j, p, "dt", 0.0);
        if (!(s.fixed_dt > 0.0)) throw ConfigError("solver.dt", "must be positive");
    } else {
        throw ConfigError("solver.dt_policy", "expected \"auto\" or \"fixed\"");
    }
    for (auto [key, field] : {std::pair{"cfl_advection", &s.cfl_advection},
                              std::pair{"cfl_diffusion", &s.cfl_diffusion},
                              std::pair{"cfl_mixing", &s.cfl_mixing}}) {
        *field = number(j, p, key, *field);
        if (!(*field > 0.0 && *field <= 1.0)) throw ConfigError(join(p, key), "must lie in (0, 1]");
    }
}

void parse_output(const json& j, RunConfig& c) {
    const std::string p = "output";
    check_keys(j, p, {"dir", "every_n_steps", "formats"});
    c.output.dir = text(j, p, "dir", c.output.dir);
    const auto every = integer(j, p, "every_n_steps", static_cast<long long>(c.output.every_n_steps));
    if (every < 1) throw ConfigError("output.every_n_steps", "must be at least 1");
    c.output.every_n_steps = static_cast<std::size_t>(every);
    if (j.contains("formats")) {
        const auto& f = j.at("formats");
        if (!f.is_array()) throw ConfigError("output.formats", "expected an array of strings");
        c.output.csv = false;
        c.output.pgm = false;
        for (const auto& item : f) {
            if (item == "csv") {
                c.output.csv = true;
            } else if (item == "pgm") {
                c.output.pgm = true;
            } else {
                throw ConfigError("output.formats", "unknown format (expected \"csv\" or \"pgm\")");
            }
        }
    }
}

}  // namespace

std::string to_string(Scenario scenario) {
    switch (scenario) {
    case Scenario::two_stream: return "two_stream";
    case Scenario::gaussian_blob: return "gaussian_blob";
    case Scenario::laminar_limit: return "laminar_limit";
    case Scenario::custom: return "custom";
    }
    return "unknown";
}

RunConfig parse_config(const json& doc) {
    check_keys(doc, "", {"grid", "velocity", "params", "solver", "scenario", "init_file", "portions", "seed", "output"});
    RunConfig c;
    if (doc.contains("grid")) {
        parse_grid(doc.at("grid"), c);
    } else {
        throw ConfigError("grid", "required");
    }
    if (doc.contains("velocity")) parse_velocity(doc.at("velocity"), c);
    if (doc.contains("params")) parse_params(doc.at("params"), c);
    if (doc.contains("solver")) parse_solver(doc.at("solver"), c);
    if (doc.contains("output")) parse_output(doc.at("output"), c);
    if (doc.contains("portions")) {
        const auto& pj = doc.at("portions");
        check_keys(pj, "portions", {"tau_supp"});
        c.tau_supp = number(pj, "portions", "tau_supp", c.tau_supp);
        if (c.tau_supp < 0.0 || c.tau_supp >= 1.0) throw ConfigError("portions.tau_supp", "must lie in [0, 1)");
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) throw ConfigError("seed", "expected an unsigned integer");
        c.seed = doc.at("seed").get<std::uint64_t>();
    }

    const auto scenario = text(doc, "", "scenario", "gaussian_blob");
    if (scenario == "two_stream") {
        c.scenario = Scenario::two_stream;
    } else if (scenario == "gaussian_blob") {
        c.scenario = Scenario::gaussian_blob;
    } else if (scenario == "laminar_limit") {
        c.scenario = Scenario::laminar_limit;
    } else if (scenario == "custom") {
        c.scenario = Scenario::custom;
    } else {
        throw ConfigError("scenario", "expected two_stream, gaussian_blob, laminar_limit or custom");
    }
    c.init_file = text(doc, "", "init_file", "");
    if (c.scenario == Scenario::custom && c.init_file.empty()) {
        throw ConfigError("init_file", "required for scenario \"custom\"");
    }
    if (c.scenario != Scenario::custom && !c.init_file.empty()) {
        throw ConfigError("init_file", "only allowed with scenario \"custom\"");
    }

    if (c.scenario == Scenario::laminar_limit) {
        if (c.params.E != 0.0) throw ConfigError("params.E", "laminar_limit requires E = 0");
        if (c.params.b_preset != BPreset::zero) {
            throw ConfigError("params.b_preset", "laminar_limit requires b_preset \"zero\"");
        }
        // validates that a suitable node exists
        laminar_node(build_velocity_grid(c.grid.dim, c.velocity.radius, c.velocity.nodes_per_axis));
    }
    return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    auto config = parse_config(doc);
    if (config.scenario == Scenario::custom) {
        std::filesystem::path init(config.init_file);
        if (init.is_relative()) config.init_file = (path.parent_path() / init).string();
    }
    return config;
}

json to_json(const RunConfig& c) {
    json j;
    j["grid"]["dim"] = c.grid.dim;
    if (c.grid.dim == 1) {
        j["grid"]["nx"] = c.grid.nx[0];
    } else {
        j["grid"]["nx"] = {c.grid.nx[0], c.grid.nx[1]};
    }
    j["grid"]["h"] = c.grid.h;
    j["grid"]["boundary"] = c.grid.boundary == Boundary::periodic ? "periodic" : "outflow";
    j["velocity"]["radius"] = c.velocity.radius;
    j["velocity"]["nodes_per_axis"] = c.velocity.nodes_per_axis;

    auto& p = j["params"];
    p["D"] = c.params.D;
    p["E"] = c.params.E;
    if (c.params.delta) {
        p["delta"] = *c.params.delta;
        p["epsilon"] = *c.params.epsilon;
    } else {
        p["kappa"] = c.params.kappa;
    }
    if (c.grid.dim == 1) {
        p["g"] = {c.params.g[0]};
    } else {
        p["g"] = {c.params.g[0], c.params.g[1]};
    }
    p["b_preset"] = c.params.b_preset == BPreset::zero ? "zero" : "one";
    p["zero_angle"] = c.params.zero_angle;

    auto& s = j["solver"];
    s["integrator"] = c.solver.integrator == Integrator::euler ? "euler" : "rk2";
    s["t_end"] = c.solver.t_end;
    s["dt_policy"] = c.solver.dt_policy == DtPolicy::auto_cfl ? "auto" : "fixed";
    if (c.solver.dt_policy == DtPolicy::fixed) s["dt"] = c.solver.fixed_dt;
    s["cfl_advection"] = c.solver.cfl_advection;
    s["cfl_diffusion"] = c.solver.cfl_diffusion;
    s["cfl_mixing"] = c.solver.cfl_mixing;

    j["scenario"] = to_string(c.scenario);
    if (c.scenario == Scenario::custom) j["init_file"] = c.init_file;
    j["portions"]["tau_supp"] = c.tau_supp;
    j["seed"] = c.seed;
    j["output"]["dir"] = c.output.dir;
    j["output"]["every_n_steps"] = c.output.every_n_steps;
    j["output"]["formats"] = json::array();
    if (c.output.csv) j["output"]["formats"].push_back("csv");
    if (c.output.pgm) j["output"]["formats"].push_back("pgm");
    return j;
}

std::size_t laminar_node(const VelocityGrid& velocity) {
    std::size_t best = velocity.size();
    for (std::size_t j = 0; j < velocity.size(); ++j) {
        const Vec& a = velocity.node(j);
        if (a[1] != 0.0 || a[0] <= 0.0) continue;
        if (best == velocity.size() || a[0] > velocity.node(best)[0]) best = j;
    }
    if (best == velocity.size()) {
        throw ConfigError("velocity.nodes_per_axis",
                          "laminar_limit needs a node on the positive x-axis (use an odd count in 2D)");
    }
    return best;
}

Problem make_problem(const RunConfig& c) {
    SpatialGrid space(c.grid.dim, c.grid.nx, c.grid.h, c.grid.boundary);
    VelocityGrid velocity = build_velocity_grid(c.grid.dim, c.velocity.radius, c.velocity.nodes_per_axis,
                                                c.params.kappa);
    MixerParams mixer;
    mixer.D = c.params.D;
    mixer.E = c.params.E;
    mixer.kappa = c.scenario == Scenario::laminar_limit ? 0.0 : c.params.kappa;
    mixer.gravity = c.params.g;
    mixer.zero_angle = c.params.zero_angle;
    BoundaryModulation b;
    if (c.params.b_preset == BPreset::one) b = constant_boundary_modulation(1.0);
    return Problem{std::move(space), std::move(velocity), mixer, std::move(b)};
}

SolverConfig effective_solver_config(const RunConfig& c, const Problem& problem) {
    SolverConfig s = c.solver;
    if (c.scenario == Scenario::laminar_limit) {
        // Courant number one along x: the upwind update is an exact shift.
        const double speed = problem.velocity.node(laminar_node(problem.velocity))[0];
        s.dt_policy = DtPolicy::fixed;
        s.fixed_dt = problem.space.h() / speed;
        if (s.t_end > 0.0) {
            const double steps = std::max(1.0, std::round(s.t_end / s.fixed_dt));
            s.t_end = steps * s.fixed_dt;
        }
    }
    return s;
}

}  // namespace selfmix::driver
