#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "selfmix/mixer.hpp"
#include "selfmix/phase_grid.hpp"

namespace selfmix {

/// Discrete pair kernel F(x_i, α_j, α_k) together with a local term D(x_i, α_j).
class PairKernelField {
public:
    PairKernelField() = default;
    PairKernelField(std::size_t cells, std::size_t nodes)
        : cells_(cells), nodes_(nodes), f_(cells * nodes * nodes, 0.0), d_(cells * nodes, 0.0) {}

    std::size_t cells() const noexcept { return cells_; }
    std::size_t nodes() const noexcept { return nodes_; }

    double& F(std::size_t i, std::size_t j, std::size_t k) noexcept { return f_[(i * nodes_ + j) * nodes_ + k]; }
    double F(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return f_[(i * nodes_ + j) * nodes_ + k];
    }
    double& D(std::size_t i, std::size_t j) noexcept { return d_[i * nodes_ + j]; }
    double D(std::size_t i, std::size_t j) const noexcept { return d_[i * nodes_ + j]; }

private:
    std::size_t cells_ = 0;
    std::size_t nodes_ = 0;
    std::vector<double> f_;
    std::vector<double> d_;
};

/// Pointwise pair function f(ρ_α, ρ_β, α, β) sampled over a field.
using PairFunction = std::function<double(double rho_alpha, double rho_beta, const Vec& alpha, const Vec& beta)>;

/// F[i, j, k] = f(ρ[i,j], ρ[i,k], α_j, α_k); D left at zero.
PairKernelField sample_pair_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                   const PairFunction& f);

/// F = M(α_j, α_k) of the mass mixer.
PairKernelField mass_mixer_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                  const MixerParams& params);

/// One scalar kernel per component of J = α M (i = 0).
std::array<PairKernelField, 2> impulse_mixer_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                                    const MixerParams& params);

/// F = <α_j, J(α_j, α_k)> with J = α M, the pair term of the local energy law.
PairKernelField energy_mixer_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                    const MixerParams& params);

/// F = x_i ∧ J(α_j, α_k) (2D scalar) with J = α M and positions relative to the
/// domain centre, the pair term of the local impulse-momentum law without J_B.
PairKernelField angular_mixer_kernel(const AlphaField& field, const SpatialGrid& space,
                                     const VelocityGrid& velocity, const MixerParams& params);

/// Sets D[i, j] = -κ Σ_k w_k F[i, j, k] so the pointwise equation holds.
void close_local_equation(PairKernelField& kernel, const VelocityGrid& velocity, double kappa);

/// R[i, j, k] = F[i, j, k] + F[i, k, j], returned in the F slots (D zero).
PairKernelField symmetrization_residual(const PairKernelField& kernel);

struct SymmetryReport {
    double max_abs = 0.0;
    /// max_abs relative to max |F|; zero when F vanishes
    double relative = 0.0;
    std::size_t cell = 0;
    std::size_t j = 0;
    std::size_t k = 0;
};

/// Largest |F[i,j,k] + F[i,k,j]| and where it occurs.
SymmetryReport symmetry_report(const PairKernelField& kernel);

/// Axis-aligned box of cells [lo, hi) per axis.
struct CellBox {
    std::array<std::size_t, 2> lo{0, 0};
    std::array<std::size_t, 2> hi{1, 1};
};

struct LocalizationTrial {
    CellBox omega;
    std::vector<std::size_t> subset;
    /// |∫_ω ∫_a [D + κ ∫_{A\a} F dβ] dx dα|
    double residual = 0.0;
    /// ∫_ω ∫_a [|D| + κ ∫_{A\a} |F| dβ] dx dα
    double scale = 0.0;

    double relative() const noexcept { return scale > 0.0 ? residual / scale : residual; }
};

/// Evaluates the integral balance over one box ω and velocity subset a.
LocalizationTrial localization_integral(const PairKernelField& kernel, const SpatialGrid& space,
                                        const VelocityGrid& velocity, double kappa, const CellBox& omega,
                                        std::vector<std::size_t> subset);

struct LocalizationReport {
    std::size_t trials = 0;
    double max_relative = 0.0;
    LocalizationTrial worst;
};

/// Runs `trials` seeded random (ω, a) pairs without checking preconditions and
/// reports the worst relative residual. Used to witness violations.
LocalizationReport localization_search(const PairKernelField& kernel, const SpatialGrid& space,
                                       const VelocityGrid& velocity, double kappa, std::size_t trials,
                                       std::uint64_t seed);

/// Checks that F is antisymmetric and D + κ Σ_k w_k F = 0 (both to `tolerance`
/// relative to the kernel magnitude; throws std::invalid_argument otherwise),
/// then runs localization_search.
LocalizationReport localization_forward_check(const PairKernelField& kernel, const SpatialGrid& space,
                                              const VelocityGrid& velocity, double kappa,
                                              std::size_t trials, std::uint64_t seed,
                                              double tolerance = 1e-12);

/// Integrates dρ_j/dt = κ Σ_k w_k M(ρ_j, ρ_k, α_j, α_k) for a spatially
/// uniform state with classical fourth-order Runge-Kutta steps of size at most
/// `dt`, evaluating M pointwise.
std::vector<double> homogeneous_mixing_oracle(std::vector<double> row, const VelocityGrid& velocity,
                                              const MixerParams& params, double t_end, double dt = 1e-5);

}  // namespace selfmix
