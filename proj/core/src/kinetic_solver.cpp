#include "selfmix/kinetic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace selfmix {

namespace {

/// Entries below -kNegativeTolerance * max|ρ| are treated as an instability.
constexpr double kNegativeTolerance = 1e-12;

void check_field(const PhaseArray& f, std::size_t step) {
    const auto v = f.values();
    double peak = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!std::isfinite(v[n])) {
            throw NumericalError(step, "non-finite density at cell " + std::to_string(n / f.nodes()) +
                                           ", node " + std::to_string(n % f.nodes()));
        }
        peak = std::max(peak, std::abs(v[n]));
    }
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (v[n] < -kNegativeTolerance * peak) {
            throw NumericalError(step, "negative density " + std::to_string(v[n]) + " at cell " +
                                           std::to_string(n / f.nodes()) + ", node " +
                                           std::to_string(n % f.nodes()) + " (stability violation)");
        }
    }
}

/// G_j(x_i) = Σ_k w_k B(x_i, α_j, α_k) with B from the constitutive relation.
std::vector<Vec> boundary_mixer_field(const PhaseArray& rho, const Problem& problem,
                                      const MixingKernel& kernel) {
    const auto& vel = problem.velocity;
    const std::size_t n = vel.size();
    std::vector<Vec> g(rho.cells() * n, Vec{0.0, 0.0});
    for (std::size_t i = 0; i < rho.cells(); ++i) {
        const auto row = rho.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            Vec acc{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j) continue;
                const double b = problem.boundary_b(i, vel.node(j), vel.node(k));
                if (b == 0.0) continue;
                const double m_jk = kernel.M(j, k, row[j], row[k]);
                const double m_kj = kernel.M(k, j, row[k], row[j]);
                acc += vel.weight(k) * boundary_mixer_B(m_jk, m_kj, vel.node(j), vel.node(k), b);
            }
            g[i * n + j] = acc;
        }
    }
    return g;
}

}  // namespace

void SolverConfig::validate() const {
    auto in_unit = [](double c) { return c > 0.0 && c <= 1.0; };
    if (!in_unit(cfl_advection) || !in_unit(cfl_diffusion) || !in_unit(cfl_mixing)) {
        throw std::invalid_argument("CFL safety factors must lie in (0, 1]");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be nonnegative");
    if (dt_policy == DtPolicy::fixed && !(fixed_dt > 0.0 && std::isfinite(fixed_dt))) {
        throw std::invalid_argument("fixed time step must be positive");
    }
}

std::vector<double> stage_weights(Integrator integrator) {
    if (integrator == Integrator::rk2) return {0.5, 0.5};
    return {1.0};
}

void add_advection(const PhaseArray& rho, const SpatialGrid& space, const VelocityGrid& velocity,
                   double scale, PhaseArray& out) {
    const std::size_t n = velocity.size();
    const double inv_h = 1.0 / space.h();
    std::vector<double> comp(n);
    for (int axis = 0; axis < space.dim(); ++axis) {
        for (std::size_t j = 0; j < n; ++j) comp[j] = velocity.node(j)[axis];
        for (std::size_t i = 0; i < rho.cells(); ++i) {
            const auto r = rho.row(i);
            const auto rp = rho.row(space.neighbor(i, axis, +1));
            const auto rm = rho.row(space.neighbor(i, axis, -1));
            auto o = out.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                // upwind side follows the velocity, not the sign of `scale`
                const double a = comp[j];
                if (a > 0.0) {
                    o[j] += scale * a * inv_h * (r[j] - rm[j]);
                } else if (a < 0.0) {
                    o[j] += scale * a * inv_h * (rp[j] - r[j]);
                }
            }
        }
    }
}

void add_diffusion(const PhaseArray& rho, const SpatialGrid& space, double scale, PhaseArray& out) {
    if (scale == 0.0) return;
    const double c = scale / (space.h() * space.h());
    for (int axis = 0; axis < space.dim(); ++axis) {
        for (std::size_t i = 0; i < rho.cells(); ++i) {
            const auto r = rho.row(i);
            const auto rp = rho.row(space.neighbor(i, axis, +1));
            const auto rm = rho.row(space.neighbor(i, axis, -1));
            auto o = out.row(i);
            for (std::size_t j = 0; j < r.size(); ++j) o[j] += c * (rp[j] - 2.0 * r[j] + rm[j]);
        }
    }
}

PhaseArray advection_term(const AlphaField& field, const SpatialGrid& space,
                          const VelocityGrid& velocity) {
    PhaseArray out(field.cells(), field.nodes());
    add_advection(field, space, velocity, 1.0, out);
    return out;
}

PhaseArray diffusion_term(const AlphaField& field, const SpatialGrid& space, double E) {
    PhaseArray out(field.cells(), field.nodes());
    add_diffusion(field, space, E, out);
    return out;
}

std::vector<double> boundary_inflow(const PhaseArray& rho, const Problem& problem) {
    const auto& space = problem.space;
    const auto& vel = problem.velocity;
    const std::size_t n = vel.size();
    std::vector<double> inflow(n, 0.0);
    if (space.boundary() == Boundary::periodic) return inflow;

    std::vector<Vec> g;
    if (problem.boundary_b && problem.mixer.kappa != 0.0) {
        g = boundary_mixer_field(rho, problem, MixingKernel(vel, problem.mixer));
    }
    const double face = space.dim() == 1 ? 1.0 : space.h();
    for (int axis = 0; axis < space.dim(); ++axis) {
        for (std::size_t i = 0; i < rho.cells(); ++i) {
            const bool low = space.beyond_boundary(i, axis, -1);
            const bool high = space.beyond_boundary(i, axis, +1);
            if (!low && !high) continue;
            const auto r = rho.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                // face flux in the +axis direction through a boundary face with a
                // zero-gradient ghost equals α_axis ρ of the boundary cell
                double flux = vel.node(j)[axis] * r[j];
                if (!g.empty()) flux += problem.mixer.kappa * g[i * n + j][axis];
                if (low) inflow[j] += face * flux;
                if (high) inflow[j] -= face * flux;
            }
        }
    }
    return inflow;
}

double stable_dt(const Problem& problem, const SolverConfig& config) {
    const auto& space = problem.space;
    const auto& vel = problem.velocity;
    const double h = space.h();
    const double E = problem.mixer.E;
    const double mixing = problem.mixer.kappa * vel.total_weight();

    double dt = std::numeric_limits<double>::infinity();
    bool any = false;
    if (const double a = vel.max_abs_component(); a > 0.0) {
        dt = std::min(dt, config.cfl_advection * h / a);
        any = true;
    }
    if (E > 0.0) {
        dt = std::min(dt, config.cfl_diffusion * h * h / (2.0 * space.dim() * E));
        any = true;
    }
    if (mixing > 0.0) {
        dt = std::min(dt, config.cfl_mixing / mixing);
        any = true;
    }
    if (!any) {
        throw std::domain_error("no advection, diffusion or mixing: stable time step is unbounded");
    }
    // Per-entry loss fraction of one Euler step: upwind outflow over all axes,
    // diffusion to 2·dim neighbours, and mixing losses bounded by κ Σ w.
    const double loss_rate = vel.max_l1_speed() / h + 2.0 * space.dim() * E / (h * h) + mixing;
    return std::min(dt, 1.0 / loss_rate);
}

KineticSolver::KineticSolver(Problem problem, SolverConfig config)
    : problem_(std::move(problem)), config_(config), kernel_(problem_.velocity, problem_.mixer) {
    config_.validate();
    if (problem_.space.dim() != problem_.velocity.dim()) {
        throw std::invalid_argument("spatial and velocity dimensions differ");
    }
}

void KineticSolver::rates(const PhaseArray& rho, PhaseArray& out) const {
    if (!out.same_shape(rho)) out = PhaseArray(rho.cells(), rho.nodes());
    for (std::size_t i = 0; i < rho.cells(); ++i) kernel_.rates(rho.row(i), out.row(i));
    add_advection(rho, problem_.space, problem_.velocity, -1.0, out);
    add_diffusion(rho, problem_.space, problem_.mixer.E, out);

    if (!problem_.boundary_b || problem_.mixer.kappa == 0.0) return;
    const auto& space = problem_.space;
    const std::size_t n = rho.nodes();
    const auto g = boundary_mixer_field(rho, problem_, kernel_);
    const double c = problem_.mixer.kappa / (2.0 * space.h());
    for (int axis = 0; axis < space.dim(); ++axis) {
        for (std::size_t i = 0; i < rho.cells(); ++i) {
            const std::size_t ip = space.neighbor(i, axis, +1);
            const std::size_t im = space.neighbor(i, axis, -1);
            auto o = out.row(i);
            for (std::size_t j = 0; j < n; ++j) o[j] -= c * (g[ip * n + j][axis] - g[im * n + j][axis]);
        }
    }
}

void KineticSolver::step(SolverState& state, double dt, Integrator integrator) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
    const std::size_t step_index = state.step_count + 1;
    const AlphaField& rho0 = state.field;
    if (rho0.cells() != problem_.space.cell_count() || rho0.nodes() != problem_.velocity.size()) {
        throw std::invalid_argument("field shape does not match the problem grids");
    }

    std::vector<AlphaField> stages{rho0};
    PhaseArray rate;
    rates(rho0, rate);

    AlphaField next = rho0;
    {
        auto v = next.values();
        const auto r = rate.values();
        for (std::size_t n = 0; n < v.size(); ++n) v[n] += dt * r[n];
    }
    check_field(next, step_index);

    if (integrator == Integrator::rk2) {
        stages.push_back(next);
        rates(stages.back(), rate);
        auto v = next.values();
        const auto r = rate.values();
        const auto r0 = rho0.values();
        for (std::size_t n = 0; n < v.size(); ++n) v[n] = 0.5 * r0[n] + 0.5 * (v[n] + dt * r[n]);
        check_field(next, step_index);
    }

    PhaseArray increment(rho0.cells(), rho0.nodes());
    {
        auto inc = increment.values();
        const auto a = next.values();
        const auto b = rho0.values();
        for (std::size_t n = 0; n < inc.size(); ++n) inc[n] = a[n] - b[n];
    }
    next.t = rho0.t + dt;

    state.stages = std::move(stages);
    state.field = std::move(next);
    state.last_increment = std::move(increment);
    state.last_dt = dt;
    state.last_integrator = integrator;
    state.step_count = step_index;
}

RunResult KineticSolver::run(AlphaField initial, const StepObserver& observer) const {
    initial.validate();
    RunResult result;
    SolverState& state = result.final_state;
    state = make_state(std::move(initial));

    const double t0 = state.t();
    const auto stats0 = field_stats(state.field, problem_.velocity, problem_.space);
    const double mass0 = stats0.total_mass;
    double expected = mass0;

    auto record = [&](double dt, double boundary_mass) {
        const auto stats = field_stats(state.field, problem_.velocity, problem_.space);
        expected += boundary_mass;
        LedgerEntry e;
        e.step = state.step_count;
        e.t = state.t();
        e.dt = dt;
        e.mass = stats.total_mass;
        e.boundary_mass = boundary_mass;
        e.expected_mass = expected;
        const double drift = std::abs(stats.total_mass - expected);
        e.relative_drift = mass0 != 0.0 ? drift / std::abs(mass0) : drift;
        e.min_rho = stats.min;
        e.max_rho = stats.max;
        result.ledger.push_back(e);
        if (observer) observer(state, e);
    };

    record(0.0, 0.0);
    if (config_.t_end == 0.0) return result;

    const double dt_max = config_.dt_policy == DtPolicy::fixed ? config_.fixed_dt : stable_dt();
    // tolerate t_end = N * dt rounding up by an ulp
    auto steps = static_cast<std::size_t>(std::ceil(config_.t_end / dt_max * (1.0 - 1e-12)));
    steps = std::max<std::size_t>(steps, 1);
    if (config_.t_end / static_cast<double>(steps) > dt_max * (1.0 + 1e-12)) ++steps;
    const double dt = config_.t_end / static_cast<double>(steps);
    result.dt = dt;

    const bool open = problem_.space.boundary() == Boundary::outflow;
    const auto weights = stage_weights(config_.integrator);
    for (std::size_t k = 1; k <= steps; ++k) {
        step(state, dt);
        state.field.t = t0 + static_cast<double>(k) * dt;
        double boundary_mass = 0.0;
        if (open) {
            for (std::size_t s = 0; s < state.stages.size(); ++s) {
                const auto inflow = boundary_inflow(state.stages[s], problem_);
                double sum = 0.0;
                for (std::size_t j = 0; j < inflow.size(); ++j) sum += problem_.velocity.weight(j) * inflow[j];
                boundary_mass += weights[s] * dt * problem_.velocity.kappa() * sum;
            }
        }
        record(dt, boundary_mass);
    }
    return result;
}

void step(SolverState& state, const Problem& problem, double dt, Integrator integrator) {
    SolverConfig config;
    config.integrator = integrator;
    KineticSolver(problem, config).step(state, dt);
}

SolverState make_state(AlphaField initial) {
    SolverState s;
    s.last_increment = PhaseArray(initial.cells(), initial.nodes());
    s.field = std::move(initial);
    return s;
}

}  // namespace selfmix
