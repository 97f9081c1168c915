#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "selfmix/types.hpp"

namespace selfmix {

/// Uniform Cartesian cell grid in one or two space dimensions.
///
/// Cells are numbered x-fastest: index = ix + nx * iy. Cell i covers
/// [origin + coords(i) * h, origin + (coords(i) + 1) * h).
class SpatialGrid {
public:
    SpatialGrid(int dim, std::array<std::size_t, 2> cells_per_axis, double h,
                Boundary boundary = Boundary::periodic, Vec origin = {0.0, 0.0});

    /// Convenience for 1D grids.
    static SpatialGrid line(std::size_t nx, double h, Boundary boundary = Boundary::periodic,
                            double origin = 0.0);

    int dim() const noexcept { return dim_; }
    double h() const noexcept { return h_; }
    Boundary boundary() const noexcept { return boundary_; }
    const Vec& origin() const noexcept { return origin_; }
    std::size_t cells_along(int axis) const noexcept { return cells_[axis]; }
    std::size_t cell_count() const noexcept { return cells_[0] * cells_[1]; }
    double cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }
    double volume() const noexcept { return cell_volume() * static_cast<double>(cell_count()); }

    std::array<std::size_t, 2> coords(std::size_t cell) const noexcept {
        return {cell % cells_[0], cell / cells_[0]};
    }
    std::size_t index(std::size_t ix, std::size_t iy = 0) const noexcept { return ix + cells_[0] * iy; }

    Vec center(std::size_t cell) const noexcept;
    Vec domain_center() const noexcept;

    /// Neighbour `offset` cells away along `axis`. Periodic grids wrap; outflow
    /// grids clamp to the boundary cell (zero-gradient ghost).
    std::size_t neighbor(std::size_t cell, int axis, int offset) const noexcept;

    /// True when the neighbour `offset` cells away along `axis` lies outside
    /// the domain of an outflow grid.
    bool beyond_boundary(std::size_t cell, int axis, int offset) const noexcept;

    /// Cell containing position x after applying the boundary rule
    /// (wrap for periodic, clamp for outflow).
    std::size_t locate(const Vec& x) const noexcept;

private:
    int dim_;
    std::array<std::size_t, 2> cells_;
    double h_;
    Boundary boundary_;
    Vec origin_;
};

/// Quadrature over the velocity ball A: nodes α_j with weights w_j, plus the
/// scale κ that multiplies each velocity-space integration when forming
/// physical quantities (mass, impulse, energy).
class VelocityGrid {
public:
    VelocityGrid(int dim, std::vector<Vec> nodes, std::vector<double> weights, double radius,
                 double kappa = 1.0);

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<Vec>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const Vec& node(std::size_t j) const noexcept { return nodes_[j]; }
    double weight(std::size_t j) const noexcept { return weights_[j]; }
    double radius() const noexcept { return radius_; }
    double kappa() const noexcept { return kappa_; }

    double total_weight() const noexcept;
    /// max_j max_axis |α_j,axis|
    double max_abs_component() const noexcept;
    /// max_j Σ_axis |α_j,axis|
    double max_l1_speed() const noexcept;

    VelocityGrid with_kappa(double kappa) const;

private:
    int dim_;
    std::vector<Vec> nodes_;
    std::vector<double> weights_;
    double radius_;
    double kappa_;
};

/// Cell-centred lattice of `nodes_per_axis` nodes per axis over [-R, R]^dim,
/// keeping the nodes whose centres lie in the closed ball of radius R.
VelocityGrid build_velocity_grid(int dim, double radius, int nodes_per_axis, double kappa = 1.0);

/// κ = (3 / 4π) (Δ / ε)^3
double kappa_from_scales(double delta, double epsilon);

/// Dense cells × nodes array of doubles, row-major per cell.
class PhaseArray {
public:
    PhaseArray() = default;
    PhaseArray(std::size_t cells, std::size_t nodes, double fill = 0.0)
        : cells_(cells), nodes_(nodes), data_(cells * nodes, fill) {}

    std::size_t cells() const noexcept { return cells_; }
    std::size_t nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * nodes_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * nodes_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * nodes_, nodes_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * nodes_, nodes_};
    }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool same_shape(const PhaseArray& other) const noexcept {
        return cells_ == other.cells_ && nodes_ == other.nodes_;
    }

    friend bool operator==(const PhaseArray&, const PhaseArray&) = default;

private:
    std::size_t cells_ = 0;
    std::size_t nodes_ = 0;
    std::vector<double> data_;
};

/// The α-density ρ[cell, node] at time t. Entries are mass per
/// (space volume × velocity volume) and must be finite and nonnegative.
class AlphaField : public PhaseArray {
public:
    AlphaField() = default;
    AlphaField(std::size_t cells, std::size_t nodes, double fill = 0.0, double t = 0.0)
        : PhaseArray(cells, nodes, fill), t(t) {}
    AlphaField(const SpatialGrid& space, const VelocityGrid& velocity, double fill = 0.0)
        : AlphaField(space.cell_count(), velocity.size(), fill) {}

    /// Throws std::invalid_argument on a non-finite or negative entry.
    void validate() const;

    double t = 0.0;
};

/// Density sampled on the spatial grid, one value per cell.
using CellField = std::vector<double>;

/// V(x_i): whether velocity node j belongs to the velocity set of cell i.
using VelocitySetPredicate = std::function<bool(std::size_t cell, std::size_t node)>;

/// ρ[i, j] = g(x_i + Δ α_j) when α_j ∈ V(x_i), else 0. Off-grid points follow
/// the grid's boundary rule.
AlphaField alpha_density_from_transport(const CellField& g, const VelocitySetPredicate& in_set,
                                        double delta, const SpatialGrid& space,
                                        const VelocityGrid& velocity);

struct FieldStats {
    double min = 0.0;
    double max = 0.0;
    double total_mass = 0.0;
    double support_fraction = 0.0;
};

/// total mass = κ Σ_i Σ_j ρ[i,j] w_j h^dim; support fraction counts entries > 0.
FieldStats field_stats(const AlphaField& field, const VelocityGrid& velocity,
                       const SpatialGrid& space);

}  // namespace selfmix
