#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "selfmix/phase_grid.hpp"
#include "selfmix/types.hpp"

namespace selfmix {

/// Parameters of the simplified mixing model.
struct MixerParams {
    /// Saturation scale of the impulse difference, D > 0.
    double D = 1.0;
    /// Diffusion constant of same-velocity exchange across cell faces, E >= 0.
    double E = 0.0;
    /// Mixing strength multiplying ∫_A M dβ. Zero switches mixing off.
    double kappa = 1.0;
    /// Uniform body force per unit mass. Enters the energy and impulse
    /// bookkeeping only; it does not act on ρ(x,t,α).
    Vec gravity{0.0, 0.0};
    /// Angle factor used when α or β is the zero vector.
    double zero_angle = 1.0;

    void validate() const;
};

/// Saturation r(d) = -d/(1+d) for d >= 0 and -d/(1-d) for d <= 0.
/// Odd, decreasing, |r| < 1.
double saturation_r(double d);

/// Φ(α, β) = cos(ϑ/2) with ϑ the angle between α and β, evaluated as
/// sqrt((1 + cos ϑ) / 2). Returns `zero_angle` if either vector is zero.
double angle_factor_phi(const Vec& alpha, const Vec& beta, double zero_angle = 1.0);

/// Mass mixer M = Φ(α,β) μ: the rate at which the α-portion gains mass from
/// the β-portion. With d = |β|ρ_β - |α|ρ_α,
///   μ = ρ_α r(D d)  if d >= 0   (α loses),
///   μ = ρ_β r(D d)  if d <  0   (α gains).
/// Antisymmetric under (α, ρ_α) <-> (β, ρ_β) bit for bit.
double mass_mixer_M(double rho_alpha, double rho_beta, const Vec& alpha, const Vec& beta,
                    const MixerParams& params);

/// Boundary mixer from the constitutive relation B = [α M(α,β) + β M(β,α)] b.
/// b = 1 gives the plain approximation, b = 0 the simplified model.
Vec boundary_mixer_B(double M_ab, double M_ba, const Vec& alpha, const Vec& beta, double b);

/// Impulse mixer J = α M(α,β) + i(α,β).
Vec impulse_mixer_J(const Vec& alpha, double M_ab, const Vec& correction = {0.0, 0.0});

/// User-pluggable modulation b(x, α, β) of the boundary mixer, evaluated per
/// cell. An empty function means b ≡ 0.
using BoundaryModulation = std::function<double(std::size_t cell, const Vec& alpha, const Vec& beta)>;

BoundaryModulation constant_boundary_modulation(double b);

/// Mass mixer specialised to one velocity grid: angle factors and speeds are
/// tabulated once, so a cell's pairwise sweep costs one saturation evaluation
/// per unordered pair. Results match mass_mixer_M exactly.
class MixingKernel {
public:
    MixingKernel(const VelocityGrid& velocity, const MixerParams& params);

    std::size_t size() const noexcept { return n_; }
    const MixerParams& params() const noexcept { return params_; }

    double phi(std::size_t j, std::size_t k) const noexcept { return phi_[j * n_ + k]; }
    double speed(std::size_t j) const noexcept { return speed_[j]; }

    /// M(α_j, α_k) for the given densities.
    double M(std::size_t j, std::size_t k, double rho_j, double rho_k) const noexcept {
        const double d = speed_[k] * rho_k - speed_[j] * rho_j;
        const double mu = (d >= 0.0 ? rho_j : rho_k) * saturation_r(params_.D * d);
        return phi_[j * n_ + k] * mu;
    }

    /// rate_j = κ Σ_k w_k M(α_j, α_k). Accumulated pairwise (j < k) so that
    /// Σ_j w_j rate_j cancels to roundoff.
    void rates(std::span<const double> row, std::span<double> out) const;

    /// Calls f(j, k, M_jk) for every unordered pair j < k.
    template <class F>
    void for_each_pair(std::span<const double> row, F&& f) const {
        for (std::size_t j = 0; j < n_; ++j) {
            const double rj = row[j];
            for (std::size_t k = j + 1; k < n_; ++k) f(j, k, M(j, k, rj, row[k]));
        }
    }

private:
    std::size_t n_;
    MixerParams params_;
    std::vector<double> phi_;
    std::vector<double> speed_;
    std::vector<double> weight_;
};

/// Right-hand side κ ∫_A M(α_j, β) dβ for one cell row.
std::vector<double> mixing_integral(std::span<const double> row, const VelocityGrid& velocity,
                                    const MixerParams& params);

}  // namespace selfmix
