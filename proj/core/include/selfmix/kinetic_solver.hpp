#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "selfmix/mixer.hpp"
#include "selfmix/phase_grid.hpp"

namespace selfmix {

enum class Integrator { euler, rk2 };
enum class DtPolicy { auto_cfl, fixed };

struct SolverConfig {
    DtPolicy dt_policy = DtPolicy::auto_cfl;
    /// Step used by DtPolicy::fixed.
    double fixed_dt = 0.0;
    double cfl_advection = 0.5;
    double cfl_diffusion = 0.25;
    double cfl_mixing = 0.5;
    /// Integration horizon, measured from the initial field's time.
    double t_end = 1.0;
    Integrator integrator = Integrator::euler;

    void validate() const;
};

/// Everything that defines the evolution equation
///   ∂_t ρ + <α, ∇_x ρ> - E Δ_x ρ = κ ∫_A M dβ  [- κ ∫_A div_x B dβ].
/// The bracketed boundary-mixer term is active only when `boundary_b` is set.
struct Problem {
    SpatialGrid space;
    VelocityGrid velocity;
    MixerParams mixer;
    BoundaryModulation boundary_b;
};

struct SolverState {
    AlphaField field;
    std::size_t step_count = 0;
    /// ρ(t + Δt) - ρ(t) of the most recent step.
    PhaseArray last_increment;
    double last_dt = 0.0;
    Integrator last_integrator = Integrator::euler;
    /// Snapshots at which the right-hand side was evaluated during the most
    /// recent step; the increment is Δt Σ_s stage_weights[s] · rhs(stages[s]).
    std::vector<AlphaField> stages;

    double t() const noexcept { return field.t; }
};

/// Weights that combine stage right-hand sides into one step.
/// Euler: {1}. rk2 (two-stage strong-stability-preserving Heun): {1/2, 1/2}.
std::vector<double> stage_weights(Integrator integrator);

/// <α_j, ∇_x ρ> per entry with first-order upwinding (backward difference for
/// a positive component, forward for a negative one).
PhaseArray advection_term(const AlphaField& field, const SpatialGrid& space,
                          const VelocityGrid& velocity);

/// E Δ_x ρ per entry, second-order central Laplacian.
PhaseArray diffusion_term(const AlphaField& field, const SpatialGrid& space, double E);

/// out += scale * <α, ∇_x ρ> (same stencil as advection_term).
void add_advection(const PhaseArray& rho, const SpatialGrid& space, const VelocityGrid& velocity,
                   double scale, PhaseArray& out);
/// out += scale * Δ_x ρ.
void add_diffusion(const PhaseArray& rho, const SpatialGrid& space, double scale, PhaseArray& out);

/// Net rate at which Σ_i h^dim ρ[i, j] enters the domain through outflow
/// boundaries, per velocity node. All zeros on periodic grids.
std::vector<double> boundary_inflow(const PhaseArray& rho, const Problem& problem);

/// Largest explicit step allowed by the advection, diffusion and mixing bounds,
/// additionally capped so that the combined per-entry loss fraction of one
/// Euler step cannot exceed one. Throws std::domain_error when all three
/// mechanisms are switched off.
double stable_dt(const Problem& problem, const SolverConfig& config);

/// One row of the per-step conservation ledger.
struct LedgerEntry {
    std::size_t step = 0;
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    /// Mass that crossed outflow boundaries during this step (positive = in).
    double boundary_mass = 0.0;
    /// initial mass + accumulated boundary mass
    double expected_mass = 0.0;
    double relative_drift = 0.0;
    double min_rho = 0.0;
    double max_rho = 0.0;
};

using StepObserver = std::function<void(const SolverState&, const LedgerEntry&)>;

struct RunResult {
    SolverState final_state;
    std::vector<LedgerEntry> ledger;
    double dt = 0.0;
};

/// Explicit solver for the simplified mass conservation law.
class KineticSolver {
public:
    explicit KineticSolver(Problem problem, SolverConfig config = {});

    const Problem& problem() const noexcept { return problem_; }
    const SolverConfig& config() const noexcept { return config_; }
    const MixingKernel& kernel() const noexcept { return kernel_; }

    /// ∂_t ρ for the given snapshot.
    void rates(const PhaseArray& rho, PhaseArray& out) const;

    double stable_dt() const { return selfmix::stable_dt(problem_, config_); }

    void step(SolverState& state, double dt) const { step(state, dt, config_.integrator); }
    void step(SolverState& state, double dt, Integrator integrator) const;

    /// Steps from `initial` to initial.t + t_end in equal steps no larger than
    /// the policy step. The observer sees the initial state (step 0) and every
    /// accepted step.
    RunResult run(AlphaField initial, const StepObserver& observer = {}) const;

private:
    Problem problem_;
    SolverConfig config_;
    MixingKernel kernel_;
};

/// Free-function form of KineticSolver::step.
void step(SolverState& state, const Problem& problem, double dt, Integrator integrator);

/// Starts a state from an initial field.
SolverState make_state(AlphaField initial);

}  // namespace selfmix
