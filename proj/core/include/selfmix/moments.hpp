#pragma once

#include <vector>

#include "selfmix/kinetic_solver.hpp"
#include "selfmix/phase_grid.hpp"

namespace selfmix {

/// Observable (Euler) fields recovered from velocity moments of ρ(x,t,α).
struct EulerFields {
    /// ϱ(x,t) per cell
    std::vector<double> rho;
    /// mean velocity per cell; zero at vacuum cells
    std::vector<Vec> v;
    /// internal-energy density ε(x,t) ϱ(x,t) per cell
    std::vector<double> eps_rho;
    double t = 0.0;
};

/// ϱ_i = κ Σ_j w_j ρ[i, j]
std::vector<double> mass_density(const AlphaField& field, const VelocityGrid& velocity);

/// v_i = Σ_j w_j α_j ρ[i,j] / Σ_j w_j ρ[i,j], and 0 where the denominator is at
/// most 1e-14 times its largest value over the cells.
std::vector<Vec> mean_velocity(const AlphaField& field, const VelocityGrid& velocity);

/// κ Σ_i Σ_j w_j h^dim α_j ρ[i, j]
Vec total_impulse(const AlphaField& field, const SpatialGrid& space, const VelocityGrid& velocity);

/// κ Σ_i Σ_j w_j h^dim (x_i ∧ α_j) ρ[i, j], positions relative to the domain
/// centre. Zero in 1D.
double angular_momentum(const AlphaField& field, const SpatialGrid& space,
                        const VelocityGrid& velocity);

/// Forward-Euler update of ε ϱ over one solver step:
///   εϱ += Δt κ Σ_j w_j [<α_j, g> ρ - |α_j|^2 (adv - diff + (Δρ / Δt) / 2)],
/// where adv and diff are the solver's discrete transport terms at `before`
/// and Δρ is the increment the solver actually applied.
std::vector<double> energy_update(const std::vector<double>& eps_rho, const AlphaField& before,
                                  const PhaseArray& increment, double dt, const SpatialGrid& space,
                                  const VelocityGrid& velocity, const MixerParams& params);

/// Σ_i h^dim εϱ_i
double energy_integral(const std::vector<double>& eps_rho, const SpatialGrid& space);

/// Builds ϱ, v and the carried εϱ for a field.
EulerFields euler_fields(const AlphaField& field, const VelocityGrid& velocity,
                         std::vector<double> eps_rho);

/// Per-step impulse ledger with J = α M, J_B = 0, i = 0:
///   residual = Δimp/Δt - (mixer transfer + boundary flux + force).
/// Each term is a total over the domain (vector); `relative` divides the
/// residual norm by the L1 magnitude of the individual contributions.
struct ImpulseBudget {
    Vec observed_rate{0.0, 0.0};
    Vec mixer_transfer{0.0, 0.0};
    Vec boundary_flux{0.0, 0.0};
    Vec force{0.0, 0.0};
    Vec residual{0.0, 0.0};
    double scale = 0.0;
    double relative = 0.0;
};

/// `before` is the field the step started from; `after` the state returned by
/// the solver (its stages and increment are used).
ImpulseBudget impulse_budget(const AlphaField& before, const SolverState& after,
                             const Problem& problem);

}  // namespace selfmix
