#pragma once

#include <cstdint>

#include "selfmix/driver/config.hpp"

namespace selfmix::driver {

/// Spatial profile exp(-|x - c|^2 / (2 σ^2)) with c the domain centre and
/// σ = 0.1 L (L the extent along x).
CellField gaussian_profile(const SpatialGrid& space);

/// Maxwellian exp(-|α - u|^2 / (2 s^2)) over the nodes, scaled so that
/// Σ_j w_j f_j = 1.
std::vector<double> maxwellian(const VelocityGrid& velocity, const Vec& u, double s);

/// ρ[i, j] = n_i f_j
AlphaField product_field(const CellField& n, const std::vector<double>& f);

/// Gaussian blob drifting with u = (0.3 R, 0), thermal spread s = 0.3 R.
AlphaField gaussian_blob(const SpatialGrid& space, const VelocityGrid& velocity);

/// Counter-streaming beams at ±(0.5 R, 0), s = 0.15 R, on the density
/// 1 + 0.2 cos(2π x / L) with 1% multiplicative noise from `seed`.
AlphaField two_stream(const SpatialGrid& space, const VelocityGrid& velocity, std::uint64_t seed);

/// Gaussian blob carried entirely by the node `node`.
AlphaField single_node_blob(const SpatialGrid& space, const VelocityGrid& velocity, std::size_t node);

/// Initial field for a config (reads the snapshot for scenario custom).
AlphaField initial_field(const RunConfig& config, const Problem& problem);

}  // namespace selfmix::driver
