#include "selfmix/driver/commands.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "selfmix/driver/io.hpp"
#include "selfmix/driver/scenarios.hpp"
#include "selfmix/localization.hpp"
#include "selfmix/moments.hpp"
#include "selfmix/portions.hpp"

namespace selfmix::driver {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kLedgerTail = 10;
constexpr double kMassTolerance = 1e-10;
constexpr double kImpulseTolerance = 1e-10;
constexpr double kPositivityTolerance = 1e-15;
constexpr double kSymmetryTolerance = 1e-15;
constexpr double kLocalizationTolerance = 1e-12;

json ledger_json(const LedgerEntry& e, double impulse_residual) {
    return {{"step", e.step},
            {"t", e.t},
            {"dt", e.dt},
            {"mass", e.mass},
            {"boundary_mass", e.boundary_mass},
            {"expected_mass", e.expected_mass},
            {"relative_drift", e.relative_drift},
            {"min_rho", e.min_rho},
            {"max_rho", e.max_rho},
            {"impulse_residual", impulse_residual}};
}

std::ofstream open_csv(const fs::path& path, const std::string& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header << '\n';
    return out;
}

/// Everything a command needs before stepping: the problem, the solver
/// settings it will actually use, the initial field and the step size.
struct Setup {
    Problem problem;
    SolverConfig solver;
    AlphaField initial;
    double dt = 0.0;
};

Setup prepare(const RunConfig& config) {
    Problem problem = make_problem(config);
    SolverConfig solver = effective_solver_config(config, problem);
    try {
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("solver", e.what());
    }
    AlphaField initial = initial_field(config, problem);
    double dt = 0.0;
    if (solver.dt_policy == DtPolicy::fixed) {
        dt = solver.fixed_dt;
    } else {
        try {
            dt = stable_dt(problem, solver);
        } catch (const std::domain_error& e) {
            throw ConfigError("solver.dt_policy", e.what());
        }
    }
    return {std::move(problem), solver, std::move(initial), dt};
}

/// max |final - exact shift| / max |initial| for the laminar scenario: the
/// Courant-one upwind step moves the carried node exactly one cell along x.
double laminar_translation_error(const AlphaField& initial, const AlphaField& final_field,
                                 const SpatialGrid& space, std::size_t steps) {
    const std::size_t nx = space.cells_along(0);
    double peak = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < space.cell_count(); ++i) {
        const auto [ix, iy] = space.coords(i);
        std::size_t src = 0;
        if (space.boundary() == Boundary::periodic) {
            src = (ix + nx - steps % nx) % nx;
        } else {
            src = ix >= steps ? ix - steps : 0;
        }
        const auto a = initial.row(space.index(src, iy));
        const auto b = final_field.row(i);
        for (std::size_t j = 0; j < a.size(); ++j) {
            err = std::max(err, std::abs(b[j] - a[j]));
            peak = std::max(peak, std::abs(initial(i, j)));
        }
    }
    return peak > 0.0 ? err / peak : err;
}

std::string dims_header(int dim) { return dim == 2 ? "x,y" : "x"; }

}  // namespace

void apply_overrides(RunConfig& config, const RunOverrides& overrides) {
    if (overrides.out) config.output.dir = overrides.out->string();
    if (overrides.seed) config.seed = *overrides.seed;
}

CommandResult simulate(const RunConfig& config, std::ostream& log) {
    CommandResult result;
    result.out_dir = config.output.dir;
    const fs::path dir = result.out_dir;
    fs::create_directories(dir);
    write_json(dir / "config.json", to_json(config));

    json& summary = result.summary;
    summary["config"] = to_json(config);
    summary["laminar"] = config.scenario == Scenario::laminar_limit;

    std::optional<Setup> prepared;
    try {
        prepared.emplace(prepare(config));
    } catch (const ConfigError& e) {
        summary["status"] = "failed";
        summary["error"] = e.what();
        write_json(dir / "summary.json", summary);
        log << "config error: " << e.what() << '\n';
        result.exit_code = exit_config_error;
        return result;
    }
    const Setup& setup = *prepared;
    const Problem& problem = setup.problem;
    const auto& space = problem.space;
    const auto& vel = problem.velocity;
    KineticSolver solver(problem, setup.solver);

    auto moments = open_csv(dir / "moments.csv",
                            "t,total_mass,impulse_x,impulse_y,angular_momentum,min_rho,max_rho,energy");
    auto ledger = open_csv(dir / "ledger.csv",
                           "step,t,dt,mass,boundary_mass,expected_mass,relative_drift,min_rho,max_rho,"
                           "impulse_residual");

    std::vector<double> eps_rho(space.cell_count(), 0.0);
    AlphaField previous = setup.initial;
    std::deque<json> tail;
    json pgm_bounds = json::array();
    std::size_t last_snapshot = 0;
    bool any_snapshot = false;
    double max_drift = 0.0;
    double max_impulse = 0.0;
    double min_energy = 0.0;
    LedgerEntry last_entry;
    std::size_t previous_step = 0;

    auto snapshot = [&](const SolverState& state) {
        const std::size_t k = state.step_count;
        if (config.output.csv) write_snapshot(dir / snapshot_name(k), state.field, space, vel);
        if (config.output.pgm) {
            const auto s = write_pgm(dir / ("rho_t" + std::to_string(k) + ".pgm"),
                                     mass_density(state.field, vel), space);
            pgm_bounds.push_back({{"step", k}, {"min", s.min}, {"max", s.max}});
        }
        last_snapshot = k;
        any_snapshot = true;
    };

    auto observer = [&](const SolverState& state, const LedgerEntry& e) {
        double impulse_rel = 0.0;
        if (state.step_count > 0) {
            eps_rho = energy_update(eps_rho, previous, state.last_increment, state.last_dt, space, vel,
                                    problem.mixer);
            impulse_rel = impulse_budget(previous, state, problem).relative;
        }
        const Vec imp = total_impulse(state.field, space, vel);
        const double energy = energy_integral(eps_rho, space);
        min_energy = std::min(min_energy, energy);
        moments << format_double(state.t()) << ',' << format_double(e.mass) << ',' << format_double(imp[0])
                << ',' << format_double(imp[1]) << ',' << format_double(angular_momentum(state.field, space, vel))
                << ',' << format_double(e.min_rho) << ',' << format_double(e.max_rho) << ','
                << format_double(energy) << '\n';
        ledger << e.step << ',' << format_double(e.t) << ',' << format_double(e.dt) << ','
               << format_double(e.mass) << ',' << format_double(e.boundary_mass) << ','
               << format_double(e.expected_mass) << ',' << format_double(e.relative_drift) << ','
               << format_double(e.min_rho) << ',' << format_double(e.max_rho) << ','
               << format_double(impulse_rel) << '\n';
        tail.push_back(ledger_json(e, impulse_rel));
        if (tail.size() > kLedgerTail) tail.pop_front();
        max_drift = std::max(max_drift, e.relative_drift);
        max_impulse = std::max(max_impulse, impulse_rel);
        last_entry = e;
        if (state.step_count % config.output.every_n_steps == 0) snapshot(state);
        previous = state.field;
        previous_step = state.step_count;
    };

    summary["dt"] = setup.dt;
    summary["integrator"] = setup.solver.integrator == Integrator::euler ? "euler" : "rk2";
    summary["t_end"] = setup.solver.t_end;
    try {
        auto run = solver.run(setup.initial, observer);
        if (!any_snapshot || last_snapshot != run.final_state.step_count) snapshot(run.final_state);
        summary["status"] = "ok";
        summary["steps"] = run.final_state.step_count;
        summary["t_final"] = run.final_state.t();
        if (config.scenario == Scenario::laminar_limit) {
            summary["laminar_translation_error"] =
                laminar_translation_error(setup.initial, run.final_state.field, space, run.final_state.step_count);
        }
        result.exit_code = exit_ok;
    } catch (const NumericalError& e) {
        summary["status"] = "failed";
        summary["error"] = e.what();
        summary["failed_step"] = e.step();
        log << "numerical abort at step " << e.step() << ": " << e.what() << '\n';
        result.exit_code = exit_numerical_abort;
        // keep the last accepted state for post-mortem diagnosis
        if (!any_snapshot || last_snapshot != previous_step) {
            SolverState last = make_state(previous);
            last.step_count = previous_step;
            snapshot(last);
        }
    }
    summary["initial_mass"] = field_stats(setup.initial, vel, space).total_mass;
    summary["final_mass"] = last_entry.mass;
    summary["final_mass_drift"] = last_entry.relative_drift;
    summary["max_mass_drift"] = max_drift;
    summary["max_impulse_residual"] = max_impulse;
    summary["min_energy"] = min_energy;
    summary["pgm_bounds"] = pgm_bounds;
    summary["ledger_tail"] = json(std::vector<json>(tail.begin(), tail.end()));
    moments.flush();
    ledger.flush();
    write_json(dir / "summary.json", summary);
    return result;
}

CommandResult simulate_file(const fs::path& config_path, const RunOverrides& overrides, std::ostream& log) {
    RunConfig config;
    try {
        config = parse_config_file(config_path);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return {exit_config_error, {}, {{"status", "failed"}, {"error", e.what()}}};
    }
    apply_overrides(config, overrides);
    return simulate(config, log);
}

bool Region::contains(const Vec& x) const noexcept {
    for (int a = 0; a < dim; ++a) {
        if (!(x[a] >= lo[a] && x[a] < hi[a])) return false;
    }
    return true;
}

Region parse_region(const std::string& text, int dim) {
    Region r;
    r.dim = dim;
    std::stringstream ss(text);
    std::string part;
    int axis = 0;
    while (std::getline(ss, part, ',')) {
        if (axis >= dim) throw ConfigError("--region", "'" + text + "' has more ranges than dimensions");
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw ConfigError("--region", "'" + text + "': expected lo:hi");
        try {
            std::size_t used = 0;
            const auto lo_text = part.substr(0, colon);
            const auto hi_text = part.substr(colon + 1);
            r.lo[axis] = std::stod(lo_text, &used);
            if (used != lo_text.size()) throw std::invalid_argument("trailing text");
            r.hi[axis] = std::stod(hi_text, &used);
            if (used != hi_text.size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw ConfigError("--region", "'" + text + "': bounds must be numbers");
        }
        if (!(r.lo[axis] < r.hi[axis])) throw ConfigError("--region", "'" + text + "': empty range");
        ++axis;
    }
    if (axis != dim) throw ConfigError("--region", "'" + text + "' needs one range per dimension");
    return r;
}

CommandResult run_portions(const RunConfig& config, const std::vector<Region>& regions, std::ostream& log) {
    CommandResult result;
    result.out_dir = config.output.dir;
    const fs::path dir = result.out_dir;
    json& summary = result.summary;
    auto fail_config = [&](const std::string& what) {
        summary["status"] = "failed";
        summary["error"] = what;
        write_json(dir / "portions.json", summary);
        log << "config error: " << what << '\n';
        result.exit_code = exit_config_error;
        return result;
    };

    fs::create_directories(dir);
    write_json(dir / "config.json", to_json(config));
    summary["config"] = to_json(config);
    summary["laminar"] = config.scenario == Scenario::laminar_limit;
    if (regions.empty()) return fail_config("--region: at least one region is required");
    if (config.params.b_preset != BPreset::zero) {
        return fail_config("params.b_preset: portion tracking requires b_preset \"zero\"");
    }

    std::optional<Setup> prepared;
    try {
        prepared.emplace(prepare(config));
    } catch (const ConfigError& e) {
        return fail_config(e.what());
    }
    const Setup& setup = *prepared;
    const Problem& problem = setup.problem;
    const auto& space = problem.space;
    const auto& vel = problem.velocity;

    std::vector<PortionTag> tags;
    json region_json = json::array();
    for (std::size_t r = 0; r < regions.size(); ++r) {
        const auto& reg = regions[r];
        try {
            tags.push_back(seed_portion(setup.initial, space, vel,
                                        [&](std::size_t, const Vec& c) { return reg.contains(c); }));
        } catch (const std::invalid_argument& e) {
            return fail_config("--region " + std::to_string(r) + ": " + e.what());
        }
        json rj = {{"lo", json::array()}, {"hi", json::array()}};
        for (int a = 0; a < reg.dim; ++a) {
            rj["lo"].push_back(reg.lo[a]);
            rj["hi"].push_back(reg.hi[a]);
        }
        region_json.push_back(rj);
    }
    summary["regions"] = region_json;

    const std::size_t count = tags.size();
    std::vector<double> mass0(count);
    std::vector<std::ofstream> series;
    for (std::size_t r = 0; r < count; ++r) {
        mass0[r] = tagged_mass(tags[r], space, vel);
        series.push_back(open_csv(dir / ("portion_" + std::to_string(r) + ".csv"),
                                  "step,t,support_cells,support_volume,tagged_mass,domination_violation"));
    }
    std::string header = "step,t";
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a + 1; b < count; ++b) {
            pairs.emplace_back(a, b);
            header += ",overlap_" + std::to_string(a) + "_" + std::to_string(b);
        }
    }
    auto overlap = open_csv(dir / "overlap.csv", header);

    std::vector<std::optional<double>> first_positive(pairs.size());
    std::vector<double> max_overlap(pairs.size(), 0.0);
    double max_violation = 0.0;
    double max_tag_drift = 0.0;
    const bool periodic = space.boundary() == Boundary::periodic;

    auto observer = [&](const SolverState& state, const LedgerEntry&) {
        if (state.step_count > 0) evolve_tags(tags, state, problem);
        const auto all = state.field.values();
        const double peak = all.empty() ? 0.0 : *std::max_element(all.begin(), all.end());
        std::vector<SupportSet> supports;
        for (std::size_t r = 0; r < count; ++r) {
            const auto tv = tags[r].values.values();
            double violation = 0.0;
            for (std::size_t n = 0; n < tv.size(); ++n) {
                violation = std::max({violation, -tv[n], tv[n] - all[n]});
            }
            violation = peak > 0.0 ? violation / peak : violation;
            max_violation = std::max(max_violation, violation);
            const double m = tagged_mass(tags[r], space, vel);
            if (periodic && mass0[r] != 0.0) max_tag_drift = std::max(max_tag_drift, std::abs(m - mass0[r]) / mass0[r]);
            supports.push_back(covering_set(tags[r], vel, config.tau_supp));
            const auto& s = supports.back();
            series[r] << state.step_count << ',' << format_double(state.t()) << ',' << s.size() << ','
                      << format_double(static_cast<double>(s.size()) * space.cell_volume()) << ','
                      << format_double(m) << ',' << format_double(violation) << '\n';
            if (state.step_count % config.output.every_n_steps == 0) {
                auto cells = open_csv(dir / ("support_" + std::to_string(r) + "_t" +
                                             std::to_string(state.step_count) + ".csv"),
                                      dims_header(space.dim()) + ",tagged_cell_mass");
                for (std::size_t c : s.cells) {
                    const Vec x = space.center(c);
                    double cm = 0.0;
                    const auto row = tags[r].values.row(c);
                    for (std::size_t j = 0; j < row.size(); ++j) cm += vel.weight(j) * row[j];
                    cells << format_double(x[0]);
                    if (space.dim() == 2) cells << ',' << format_double(x[1]);
                    cells << ',' << format_double(vel.kappa() * cm) << '\n';
                }
            }
        }
        overlap << state.step_count << ',' << format_double(state.t());
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const double v = overlap_measure(supports[pairs[p].first], supports[pairs[p].second], space);
            overlap << ',' << format_double(v);
            max_overlap[p] = std::max(max_overlap[p], v);
            if (v > 0.0 && !first_positive[p]) first_positive[p] = state.t();
        }
        overlap << '\n';
    };

    summary["dt"] = setup.dt;
    try {
        auto run = KineticSolver(problem, setup.solver).run(setup.initial, observer);
        summary["status"] = "ok";
        summary["steps"] = run.final_state.step_count;
        summary["t_final"] = run.final_state.t();
        result.exit_code = exit_ok;
    } catch (const NumericalError& e) {
        summary["status"] = "failed";
        summary["error"] = e.what();
        summary["failed_step"] = e.step();
        log << "numerical abort at step " << e.step() << ": " << e.what() << '\n';
        result.exit_code = exit_numerical_abort;
    }
    json pj = json::array();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        pj.push_back({{"a", pairs[p].first},
                      {"b", pairs[p].second},
                      {"max_overlap", max_overlap[p]},
                      {"first_positive_time", first_positive[p] ? json(*first_positive[p]) : json(nullptr)}});
    }
    summary["pairs"] = pj;
    summary["max_domination_violation"] = max_violation;
    summary["max_tag_mass_drift"] = max_tag_drift;
    overlap.flush();
    write_json(dir / "portions.json", summary);
    return result;
}

CommandResult portions_file(const fs::path& config_path, const std::vector<std::string>& specs,
                            const RunOverrides& overrides, std::ostream& log) {
    RunConfig config;
    std::vector<Region> regions;
    try {
        config = parse_config_file(config_path);
        apply_overrides(config, overrides);
        for (const auto& s : specs) regions.push_back(parse_region(s, config.grid.dim));
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return {exit_config_error, {}, {{"status", "failed"}, {"error", e.what()}}};
    }
    return run_portions(config, regions, log);
}

CommandResult diagnose(const fs::path& run_dir, const DiagnoseOptions& options, std::ostream& out) {
    CommandResult result;
    result.out_dir = run_dir;
    json& report = result.summary;
    auto missing = [&](const std::string& what) {
        out << "ERROR " << what << '\n';
        report["status"] = "error";
        report["error"] = what;
        result.exit_code = exit_config_error;
        return result;
    };

    if (!fs::is_directory(run_dir)) return missing("run directory " + run_dir.string() + " does not exist");
    if (!fs::exists(run_dir / "config.json")) return missing("config.json missing in " + run_dir.string());
    if (!fs::exists(run_dir / "ledger.csv")) return missing("ledger.csv missing in " + run_dir.string());
    const auto snapshots = list_snapshots(run_dir);
    if (snapshots.empty()) return missing("no rho_t<step>.csv snapshots in " + run_dir.string());

    RunConfig config;
    std::optional<Problem> loaded;
    try {
        config = parse_config(read_json(run_dir / "config.json"));
        loaded.emplace(make_problem(config));
    } catch (const std::exception& e) {
        return missing(std::string("unusable config.json: ") + e.what());
    }
    const Problem& problem = *loaded;
    const auto& space = problem.space;
    const auto& vel = problem.velocity;

    json checks = json::array();
    bool failed = false;
    auto line = [&](const std::string& name, const std::string& verdict, const std::string& detail,
                    json extra) {
        out << verdict << ' ' << name << ' ' << detail << '\n';
        extra["name"] = name;
        extra["verdict"] = verdict;
        checks.push_back(std::move(extra));
        failed = failed || verdict == "FAIL";
    };

    if (fs::exists(run_dir / "summary.json")) {
        std::string status = "unknown";
        try {
            status = read_json(run_dir / "summary.json").value("status", "unknown");
        } catch (const std::exception&) {
        }
        line("run_status", status == "ok" ? "PASS" : "FAIL", "status=" + status, {{"status", status}});
    }

    // ledger checks
    const auto rows = read_csv(run_dir / "ledger.csv");
    if (rows.size() < 2) return missing("ledger.csv has no entries");
    const auto& head = rows[0];
    auto column = [&](const std::string& name) {
        const auto it = std::find(head.begin(), head.end(), name);
        if (it == head.end()) throw std::runtime_error("ledger.csv lacks column " + name);
        return static_cast<std::size_t>(it - head.begin());
    };
    double max_drift = 0.0;
    double max_impulse = 0.0;
    double worst_negative = 0.0;
    try {
        const auto c_drift = column("relative_drift");
        const auto c_imp = column("impulse_residual");
        const auto c_min = column("min_rho");
        const auto c_max = column("max_rho");
        for (std::size_t r = 1; r < rows.size(); ++r) {
            max_drift = std::max(max_drift, std::stod(rows[r].at(c_drift)));
            max_impulse = std::max(max_impulse, std::stod(rows[r].at(c_imp)));
            const double mx = std::stod(rows[r].at(c_max));
            const double mn = std::stod(rows[r].at(c_min));
            if (mx > 0.0) worst_negative = std::max(worst_negative, -mn / mx);
        }
    } catch (const std::exception& e) {
        return missing(std::string("malformed ledger.csv: ") + e.what());
    }
    auto fmt = [](double v) { return format_double(v); };
    line("mass_drift", max_drift <= kMassTolerance ? "PASS" : "FAIL",
         "max_relative=" + fmt(max_drift) + " tol=" + fmt(kMassTolerance), {{"max_relative", max_drift}});
    if (config.params.b_preset == BPreset::zero) {
        line("impulse_budget", max_impulse <= kImpulseTolerance ? "PASS" : "FAIL",
             "max_relative=" + fmt(max_impulse) + " tol=" + fmt(kImpulseTolerance),
             {{"max_relative", max_impulse}});
    } else {
        line("impulse_budget", "SKIP", "boundary mixer active, budget not closed", {{"max_relative", max_impulse}});
    }
    line("positivity", worst_negative <= kPositivityTolerance ? "PASS" : "FAIL",
         "max_negative_fraction=" + fmt(worst_negative), {{"max_negative_fraction", worst_negative}});

    // kernel checks on the last snapshot
    AlphaField field;
    try {
        field = read_snapshot(snapshots.back().second, space, vel);
    } catch (const std::exception& e) {
        return missing(e.what());
    }
    auto kernel = mass_mixer_kernel(field, vel, problem.mixer);
    if (options.inject_symmetric_defect != 0.0) {
        double peak = 0.0;
        for (std::size_t i = 0; i < kernel.cells(); ++i) {
            for (std::size_t j = 0; j < kernel.nodes(); ++j) {
                for (std::size_t k = 0; k < kernel.nodes(); ++k) peak = std::max(peak, std::abs(kernel.F(i, j, k)));
            }
        }
        const double size = options.inject_symmetric_defect * (peak > 0.0 ? peak : 1.0);
        for (std::size_t i = 0; i < kernel.cells(); ++i) {
            for (std::size_t j = 0; j < kernel.nodes(); ++j) {
                for (std::size_t k = 0; k < kernel.nodes(); ++k) {
                    if (j != k) kernel.F(i, j, k) += size;
                }
            }
        }
    }
    const auto sym = symmetry_report(kernel);
    std::ostringstream where;
    where << "max_abs=" << fmt(sym.max_abs) << " relative=" << fmt(sym.relative) << " at cell " << sym.cell
          << " (j,k)=(" << sym.j << ',' << sym.k << ')';
    line("mixer_symmetrization", sym.relative <= kSymmetryTolerance ? "PASS" : "FAIL", where.str(),
         {{"max_abs", sym.max_abs}, {"relative", sym.relative}, {"cell", sym.cell}, {"j", sym.j}, {"k", sym.k}});

    const auto imp = impulse_mixer_kernel(field, vel, problem.mixer);
    const auto imp_x = symmetry_report(imp[0]);
    const auto imp_y = symmetry_report(imp[1]);
    line("impulse_symmetrization", "INFO",
         "max_abs=(" + fmt(imp_x.max_abs) + "," + fmt(imp_y.max_abs) + ") equals (a_j - a_k) M, not required zero",
         {{"max_abs_x", imp_x.max_abs}, {"max_abs_y", imp_y.max_abs}});

    const double kappa = vel.kappa();
    close_local_equation(kernel, vel, kappa);
    try {
        const auto rep = localization_forward_check(kernel, space, vel, kappa, options.localization_trials,
                                                    config.seed, kLocalizationTolerance);
        line("localization", rep.max_relative <= kLocalizationTolerance ? "PASS" : "FAIL",
             "trials=" + std::to_string(rep.trials) + " max_relative=" + fmt(rep.max_relative),
             {{"trials", rep.trials}, {"max_relative", rep.max_relative}});
    } catch (const std::invalid_argument& e) {
        const auto rep = localization_search(kernel, space, vel, kappa, options.localization_trials, config.seed);
        line("localization", "FAIL",
             std::string(e.what()) + "; worst trial relative=" + fmt(rep.max_relative),
             {{"trials", rep.trials}, {"max_relative", rep.max_relative}, {"error", e.what()}});
    }

    report["run_dir"] = run_dir.string();
    report["snapshot"] = snapshots.back().second.filename().string();
    report["checks"] = checks;
    report["status"] = failed ? "fail" : "pass";
    write_json(run_dir / "diagnose.json", report);
    result.exit_code = failed ? exit_check_failed : exit_ok;
    return result;
}

}  // namespace selfmix::driver
