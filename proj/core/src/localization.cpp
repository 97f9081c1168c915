#include "selfmix/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace selfmix {

PairKernelField sample_pair_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                   const PairFunction& f) {
    if (field.nodes() != velocity.size()) throw std::invalid_argument("sample_pair_kernel: shape mismatch");
    const std::size_t n = velocity.size();
    PairKernelField kernel(field.cells(), n);
    for (std::size_t i = 0; i < field.cells(); ++i) {
        const auto row = field.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                kernel.F(i, j, k) = f(row[j], row[k], velocity.node(j), velocity.node(k));
            }
        }
    }
    return kernel;
}

PairKernelField mass_mixer_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                  const MixerParams& params) {
    return sample_pair_kernel(field, velocity, [&](double ra, double rb, const Vec& a, const Vec& b) {
        return mass_mixer_M(ra, rb, a, b, params);
    });
}

std::array<PairKernelField, 2> impulse_mixer_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                                    const MixerParams& params) {
    std::array<PairKernelField, 2> out;
    for (int c = 0; c < 2; ++c) {
        out[c] = sample_pair_kernel(field, velocity, [&](double ra, double rb, const Vec& a, const Vec& b) {
            return impulse_mixer_J(a, mass_mixer_M(ra, rb, a, b, params))[c];
        });
    }
    return out;
}

PairKernelField energy_mixer_kernel(const AlphaField& field, const VelocityGrid& velocity,
                                    const MixerParams& params) {
    return sample_pair_kernel(field, velocity, [&](double ra, double rb, const Vec& a, const Vec& b) {
        return dot(a, impulse_mixer_J(a, mass_mixer_M(ra, rb, a, b, params)));
    });
}

PairKernelField angular_mixer_kernel(const AlphaField& field, const SpatialGrid& space,
                                     const VelocityGrid& velocity, const MixerParams& params) {
    auto kernel = mass_mixer_kernel(field, velocity, params);
    const Vec center = space.domain_center();
    for (std::size_t i = 0; i < kernel.cells(); ++i) {
        const Vec x = space.center(i) - center;
        for (std::size_t j = 0; j < kernel.nodes(); ++j) {
            for (std::size_t k = 0; k < kernel.nodes(); ++k) {
                kernel.F(i, j, k) = cross(x, impulse_mixer_J(velocity.node(j), kernel.F(i, j, k)));
            }
        }
    }
    return kernel;
}

void close_local_equation(PairKernelField& kernel, const VelocityGrid& velocity, double kappa) {
    for (std::size_t i = 0; i < kernel.cells(); ++i) {
        for (std::size_t j = 0; j < kernel.nodes(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < kernel.nodes(); ++k) s += velocity.weight(k) * kernel.F(i, j, k);
            kernel.D(i, j) = -kappa * s;
        }
    }
}

PairKernelField symmetrization_residual(const PairKernelField& kernel) {
    PairKernelField r(kernel.cells(), kernel.nodes());
    for (std::size_t i = 0; i < kernel.cells(); ++i) {
        for (std::size_t j = 0; j < kernel.nodes(); ++j) {
            for (std::size_t k = 0; k < kernel.nodes(); ++k) r.F(i, j, k) = kernel.F(i, j, k) + kernel.F(i, k, j);
        }
    }
    return r;
}

SymmetryReport symmetry_report(const PairKernelField& kernel) {
    SymmetryReport rep;
    double peak = 0.0;
    for (std::size_t i = 0; i < kernel.cells(); ++i) {
        for (std::size_t j = 0; j < kernel.nodes(); ++j) {
            for (std::size_t k = j; k < kernel.nodes(); ++k) {
                peak = std::max({peak, std::abs(kernel.F(i, j, k)), std::abs(kernel.F(i, k, j))});
                const double s = std::abs(kernel.F(i, j, k) + kernel.F(i, k, j));
                if (s > rep.max_abs) {
                    rep.max_abs = s;
                    rep.cell = i;
                    rep.j = j;
                    rep.k = k;
                }
            }
        }
    }
    rep.relative = peak > 0.0 ? rep.max_abs / peak : 0.0;
    return rep;
}

LocalizationTrial localization_integral(const PairKernelField& kernel, const SpatialGrid& space,
                                        const VelocityGrid& velocity, double kappa, const CellBox& omega,
                                        std::vector<std::size_t> subset) {
    const std::size_t n = velocity.size();
    if (kernel.cells() != space.cell_count() || kernel.nodes() != n) {
        throw std::invalid_argument("localization_integral: shape mismatch");
    }
    std::vector<char> in_a(n, 0);
    for (std::size_t j : subset) {
        if (j >= n) throw std::invalid_argument("velocity subset index out of range");
        in_a[j] = 1;
    }

    double residual = 0.0;
    double scale = 0.0;
    for (std::size_t iy = omega.lo[1]; iy < omega.hi[1]; ++iy) {
        for (std::size_t ix = omega.lo[0]; ix < omega.hi[0]; ++ix) {
            const std::size_t i = space.index(ix, iy);
            for (std::size_t j = 0; j < n; ++j) {
                if (!in_a[j]) continue;
                double inner = 0.0;
                double inner_abs = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (in_a[k]) continue;
                    inner += velocity.weight(k) * kernel.F(i, j, k);
                    inner_abs += velocity.weight(k) * std::abs(kernel.F(i, j, k));
                }
                residual += velocity.weight(j) * (kernel.D(i, j) + kappa * inner);
                scale += velocity.weight(j) * (std::abs(kernel.D(i, j)) + kappa * inner_abs);
            }
        }
    }
    LocalizationTrial trial;
    trial.omega = omega;
    trial.subset = std::move(subset);
    trial.residual = std::abs(residual) * space.cell_volume();
    trial.scale = scale * space.cell_volume();
    return trial;
}

LocalizationReport localization_search(const PairKernelField& kernel, const SpatialGrid& space,
                                       const VelocityGrid& velocity, double kappa, std::size_t trials,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = velocity.size();
    std::vector<std::size_t> order(n);
    LocalizationReport report;
    for (std::size_t t = 0; t < trials; ++t) {
        CellBox box;
        for (int axis = 0; axis < space.dim(); ++axis) {
            const std::size_t cells = space.cells_along(axis);
            box.lo[axis] = std::uniform_int_distribution<std::size_t>(0, cells - 1)(rng);
            box.hi[axis] = std::uniform_int_distribution<std::size_t>(box.lo[axis] + 1, cells)(rng);
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, n)(rng);
        std::vector<std::size_t> subset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
        std::sort(subset.begin(), subset.end());

        auto trial = localization_integral(kernel, space, velocity, kappa, box, std::move(subset));
        ++report.trials;
        if (report.trials == 1 || trial.relative() > report.max_relative) {
            report.max_relative = trial.relative();
            report.worst = std::move(trial);
        }
    }
    return report;
}

LocalizationReport localization_forward_check(const PairKernelField& kernel, const SpatialGrid& space,
                                              const VelocityGrid& velocity, double kappa,
                                              std::size_t trials, std::uint64_t seed, double tolerance) {
    double f_peak = 0.0;
    double d_peak = 0.0;
    for (std::size_t i = 0; i < kernel.cells(); ++i) {
        for (std::size_t j = 0; j < kernel.nodes(); ++j) {
            d_peak = std::max(d_peak, std::abs(kernel.D(i, j)));
            for (std::size_t k = 0; k < kernel.nodes(); ++k) f_peak = std::max(f_peak, std::abs(kernel.F(i, j, k)));
        }
    }
    const auto sym = symmetry_report(kernel);
    if (sym.max_abs > tolerance * f_peak) {
        throw std::invalid_argument("pair kernel is not antisymmetric at cell " + std::to_string(sym.cell) +
                                    ", nodes (" + std::to_string(sym.j) + ", " + std::to_string(sym.k) + ")");
    }
    const double local_scale = std::max(d_peak, kappa * velocity.total_weight() * f_peak);
    for (std::size_t i = 0; i < kernel.cells(); ++i) {
        for (std::size_t j = 0; j < kernel.nodes(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < kernel.nodes(); ++k) s += velocity.weight(k) * kernel.F(i, j, k);
            if (std::abs(kernel.D(i, j) + kappa * s) > tolerance * local_scale) {
                throw std::invalid_argument("local equation D + κ∫F = 0 fails at cell " + std::to_string(i) +
                                            ", node " + std::to_string(j));
            }
        }
    }
    return localization_search(kernel, space, velocity, kappa, trials, seed);
}

std::vector<double> homogeneous_mixing_oracle(std::vector<double> row, const VelocityGrid& velocity,
                                              const MixerParams& params, double t_end, double dt) {
    const std::size_t n = velocity.size();
    if (row.size() != n) throw std::invalid_argument("oracle row length does not match the velocity grid");
    if (!(t_end >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("oracle needs t_end >= 0 and dt > 0");
    if (t_end == 0.0) return row;

    auto rhs = [&](const std::vector<double>& rho, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += velocity.weight(k) * mass_mixer_M(rho[j], rho[k], velocity.node(j), velocity.node(k), params);
            }
            out[j] = params.kappa * s;
        }
    };

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    const double h = t_end / static_cast<double>(steps);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t s = 0; s < steps; ++s) {
        rhs(row, k1);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = row[j] + 0.5 * h * k1[j];
        rhs(tmp, k2);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = row[j] + 0.5 * h * k2[j];
        rhs(tmp, k3);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = row[j] + h * k3[j];
        rhs(tmp, k4);
        for (std::size_t j = 0; j < n; ++j) row[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return row;
}

}  // namespace selfmix
