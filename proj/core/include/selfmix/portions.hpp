#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "selfmix/kinetic_solver.hpp"
#include "selfmix/phase_grid.hpp"

namespace selfmix {

/// Tagged sub-density of one fluid portion m(ω, a, t): 0 <= tag <= ρ entrywise.
struct PortionTag {
    PhaseArray values;
};

/// Spatial cells covered by a portion (or predicted to be), sorted ascending.
struct SupportSet {
    std::vector<std::size_t> cells;
    double threshold = 0.0;

    std::size_t size() const noexcept { return cells.size(); }
    bool empty() const noexcept { return cells.empty(); }
    bool contains(std::size_t cell) const;
    /// True when every cell of this set is also in `other`.
    bool subset_of(const SupportSet& other) const;
};

using CellPredicate = std::function<bool(std::size_t cell, const Vec& center)>;
using NodePredicate = std::function<bool(std::size_t node, const Vec& alpha)>;

/// Default relative support threshold.
inline constexpr double kDefaultSupportThreshold = 1e-6;

/// V(x_i) ≈ { j : ρ[i, j] > τ max ρ }. τ = 0 gives the exact positive support.
std::vector<std::size_t> velocity_support(const AlphaField& field, std::size_t cell, double tau);

/// Velocity supports of every cell.
std::vector<std::vector<std::size_t>> velocity_supports(const AlphaField& field, double tau);

/// tag = ρ restricted to the cells in `region` (and, optionally, to the nodes
/// in `nodes`). Throws std::invalid_argument if the region selects no cell.
PortionTag seed_portion(const AlphaField& field, const SpatialGrid& space,
                        const VelocityGrid& velocity, const CellPredicate& region,
                        const NodePredicate& nodes = {});

/// Advances tags through the step that produced `after`, using the same
/// stencils and pairwise transfers as the solver. Within each mixing pair the
/// tagged share of the transfer equals tag/ρ at the losing node.
void evolve_tags(std::span<PortionTag> tags, const SolverState& after, const Problem& problem);

inline void evolve_tag(PortionTag& tag, const SolverState& after, const Problem& problem) {
    evolve_tags(std::span<PortionTag>(&tag, 1), after, problem);
}

/// Total tagged mass κ Σ_i Σ_j w_j h^dim tag[i, j].
double tagged_mass(const PortionTag& tag, const SpatialGrid& space, const VelocityGrid& velocity);

/// Cells whose tagged mass Σ_j w_j tag[i, j] exceeds τ times the peak cell.
SupportSet covering_set(const PortionTag& tag, const VelocityGrid& velocity, double tau);

/// ∪_{y in support} [y + Δ V(y)] rasterised to cells (wrapping on periodic
/// grids, dropping points that leave an outflow domain).
SupportSet predict_set_propagation(const SupportSet& support,
                                   const std::vector<std::vector<std::size_t>>& velocity_sets,
                                   const SpatialGrid& space, const VelocityGrid& velocity,
                                   double delta);

/// Adds every cell within `radius` cells (Chebyshev distance) of the set.
SupportSet dilate(const SupportSet& set, const SpatialGrid& space, int radius);

/// |S1 ∩ S2| h^dim
double overlap_measure(const SupportSet& a, const SupportSet& b, const SpatialGrid& space);

}  // namespace selfmix
