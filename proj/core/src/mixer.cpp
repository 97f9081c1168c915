#include "selfmix/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfmix {

void MixerParams::validate() const {
    if (!(D > 0.0) || !std::isfinite(D)) throw std::invalid_argument("mixer D must be positive");
    if (!(E >= 0.0) || !std::isfinite(E)) throw std::invalid_argument("diffusion E must be nonnegative");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("mixing kappa must be nonnegative");
    }
    if (!std::isfinite(gravity[0]) || !std::isfinite(gravity[1])) {
        throw std::invalid_argument("gravity must be finite");
    }
    if (!(zero_angle >= 0.0 && zero_angle <= 1.0)) {
        throw std::invalid_argument("zero_angle must lie in [0, 1]");
    }
}

double saturation_r(double d) {
    return d >= 0.0 ? -d / (1.0 + d) : -d / (1.0 - d);
}

double angle_factor_phi(const Vec& alpha, const Vec& beta, double zero_angle) {
    const double na = norm(alpha);
    const double nb = norm(beta);
    if (na == 0.0 || nb == 0.0) return zero_angle;
    // |â + b̂| / 2 equals sqrt((1 + cos) / 2) without cancellation near cos = -1
    return std::min(1.0, 0.5 * norm((1.0 / na) * alpha + (1.0 / nb) * beta));
}

double mass_mixer_M(double rho_alpha, double rho_beta, const Vec& alpha, const Vec& beta,
                    const MixerParams& params) {
    const double d = norm(beta) * rho_beta - norm(alpha) * rho_alpha;
    const double mu = (d >= 0.0 ? rho_alpha : rho_beta) * saturation_r(params.D * d);
    return angle_factor_phi(alpha, beta, params.zero_angle) * mu;
}

Vec boundary_mixer_B(double M_ab, double M_ba, const Vec& alpha, const Vec& beta, double b) {
    return b * (M_ab * alpha + M_ba * beta);
}

Vec impulse_mixer_J(const Vec& alpha, double M_ab, const Vec& correction) {
    return M_ab * alpha + correction;
}

BoundaryModulation constant_boundary_modulation(double b) {
    if (b == 0.0) return {};
    return [b](std::size_t, const Vec&, const Vec&) { return b; };
}

MixingKernel::MixingKernel(const VelocityGrid& velocity, const MixerParams& params)
    : n_(velocity.size()), params_(params), phi_(n_ * n_), speed_(n_), weight_(velocity.weights()) {
    params_.validate();
    for (std::size_t j = 0; j < n_; ++j) {
        speed_[j] = norm(velocity.node(j));
        for (std::size_t k = 0; k < n_; ++k) {
            phi_[j * n_ + k] = angle_factor_phi(velocity.node(j), velocity.node(k), params_.zero_angle);
        }
    }
}

void MixingKernel::rates(std::span<const double> row, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (params_.kappa == 0.0) return;
    for (std::size_t j = 0; j < n_; ++j) {
        const double rj = row[j];
        const double sj = speed_[j] * rj;
        const double* phi_row = phi_.data() + j * n_;
        double acc = 0.0;
        for (std::size_t k = j + 1; k < n_; ++k) {
            const double rk = row[k];
            const double d = speed_[k] * rk - sj;
            const double m = phi_row[k] * ((d >= 0.0 ? rj : rk) * saturation_r(params_.D * d));
            acc += weight_[k] * m;
            out[k] -= weight_[j] * m;
        }
        out[j] += acc;
    }
    for (auto& r : out) r *= params_.kappa;
}

std::vector<double> mixing_integral(std::span<const double> row, const VelocityGrid& velocity,
                                    const MixerParams& params) {
    if (row.size() != velocity.size()) {
        throw std::invalid_argument("row length does not match the velocity grid");
    }
    std::vector<double> out(row.size());
    MixingKernel(velocity, params).rates(row, out);
    return out;
}

}  // namespace selfmix
