#include "selfmix/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace selfmix {

namespace {

std::size_t wrap_index(long long i, std::size_t n) {
    const auto m = static_cast<long long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace

SpatialGrid::SpatialGrid(int dim, std::array<std::size_t, 2> cells_per_axis, double h,
                         Boundary boundary, Vec origin)
    : dim_(dim), cells_(cells_per_axis), h_(h), boundary_(boundary), origin_(origin) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("spatial grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("cell spacing h must be positive and finite");
    }
    if (dim == 1) {
        cells_[1] = 1;
        origin_[1] = 0.0;
    }
    for (int axis = 0; axis < dim; ++axis) {
        if (cells_[axis] < 4) {
            throw std::invalid_argument("need at least 4 cells per axis");
        }
    }
}

SpatialGrid SpatialGrid::line(std::size_t nx, double h, Boundary boundary, double origin) {
    return SpatialGrid(1, {nx, 1}, h, boundary, {origin, 0.0});
}

Vec SpatialGrid::center(std::size_t cell) const noexcept {
    const auto c = coords(cell);
    Vec x{origin_[0] + (static_cast<double>(c[0]) + 0.5) * h_, 0.0};
    if (dim_ == 2) x[1] = origin_[1] + (static_cast<double>(c[1]) + 0.5) * h_;
    return x;
}

Vec SpatialGrid::domain_center() const noexcept {
    Vec x{origin_[0] + 0.5 * h_ * static_cast<double>(cells_[0]), 0.0};
    if (dim_ == 2) x[1] = origin_[1] + 0.5 * h_ * static_cast<double>(cells_[1]);
    return x;
}

std::size_t SpatialGrid::neighbor(std::size_t cell, int axis, int offset) const noexcept {
    auto c = coords(cell);
    const auto n = cells_[axis];
    const long long shifted = static_cast<long long>(c[axis]) + offset;
    if (boundary_ == Boundary::periodic) {
        c[axis] = wrap_index(shifted, n);
    } else {
        c[axis] = static_cast<std::size_t>(std::clamp<long long>(shifted, 0, static_cast<long long>(n) - 1));
    }
    return index(c[0], c[1]);
}

bool SpatialGrid::beyond_boundary(std::size_t cell, int axis, int offset) const noexcept {
    if (boundary_ == Boundary::periodic) return false;
    const long long shifted = static_cast<long long>(coords(cell)[axis]) + offset;
    return shifted < 0 || shifted >= static_cast<long long>(cells_[axis]);
}

std::size_t SpatialGrid::locate(const Vec& x) const noexcept {
    std::array<std::size_t, 2> c{0, 0};
    for (int axis = 0; axis < dim_; ++axis) {
        const auto n = cells_[axis];
        const double s = std::floor((x[axis] - origin_[axis]) / h_);
        // keep the cast in range before wrapping
        const double bounded = std::clamp(s, -1e15, 1e15);
        const auto k = static_cast<long long>(bounded);
        if (boundary_ == Boundary::periodic) {
            c[axis] = wrap_index(k, n);
        } else {
            c[axis] = static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(n) - 1));
        }
    }
    return index(c[0], c[1]);
}

VelocityGrid::VelocityGrid(int dim, std::vector<Vec> nodes, std::vector<double> weights,
                           double radius, double kappa)
    : dim_(dim), nodes_(std::move(nodes)), weights_(std::move(weights)), radius_(radius), kappa_(kappa) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("velocity grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (nodes_.empty() || nodes_.size() != weights_.size()) {
        throw std::invalid_argument("velocity grid needs one weight per node and at least one node");
    }
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("kappa must be positive and finite");
    }
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (dim == 1) nodes_[j][1] = 0.0;
        if (!(weights_[j] > 0.0)) throw std::invalid_argument("velocity weights must be positive");
        if (norm(nodes_[j]) > radius * (1.0 + 1e-12)) {
            throw std::invalid_argument("velocity node outside the ball A");
        }
    }
}

double VelocityGrid::total_weight() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double VelocityGrid::max_abs_component() const noexcept {
    double m = 0.0;
    for (const auto& a : nodes_) m = std::max({m, std::abs(a[0]), std::abs(a[1])});
    return m;
}

double VelocityGrid::max_l1_speed() const noexcept {
    double m = 0.0;
    for (const auto& a : nodes_) m = std::max(m, std::abs(a[0]) + std::abs(a[1]));
    return m;
}

VelocityGrid VelocityGrid::with_kappa(double kappa) const {
    return VelocityGrid(dim_, nodes_, weights_, radius_, kappa);
}

VelocityGrid build_velocity_grid(int dim, double radius, int nodes_per_axis, double kappa) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("velocity grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (nodes_per_axis < 1) throw std::invalid_argument("nodes_per_axis must be at least 1");
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");

    const double spacing = 2.0 * radius / nodes_per_axis;
    const double weight = dim == 1 ? spacing : spacing * spacing;
    std::vector<double> centers(static_cast<std::size_t>(nodes_per_axis));
    // odd integer offsets keep ±α exact mirror images
    for (int k = 0; k < nodes_per_axis; ++k) centers[k] = (2 * k + 1 - nodes_per_axis) * radius / nodes_per_axis;

    std::vector<Vec> nodes;
    if (dim == 1) {
        for (double c : centers) nodes.push_back({c, 0.0});
    } else {
        for (double cy : centers) {
            for (double cx : centers) {
                if (cx * cx + cy * cy <= radius * radius) nodes.push_back({cx, cy});
            }
        }
    }
    std::vector<double> weights(nodes.size(), weight);
    return VelocityGrid(dim, std::move(nodes), std::move(weights), radius, kappa);
}

double kappa_from_scales(double delta, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
    const double ratio = delta / epsilon;
    return 3.0 / (4.0 * std::numbers::pi) * ratio * ratio * ratio;
}

void AlphaField::validate() const {
    const auto v = values();
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!std::isfinite(v[n]) || v[n] < 0.0) {
            throw std::invalid_argument("alpha density entry (" + std::to_string(n / nodes()) + ", " +
                                        std::to_string(n % nodes()) + ") is negative or not finite");
        }
    }
}

AlphaField alpha_density_from_transport(const CellField& g, const VelocitySetPredicate& in_set,
                                        double delta, const SpatialGrid& space,
                                        const VelocityGrid& velocity) {
    if (g.size() != space.cell_count()) {
        throw std::invalid_argument("density sample count does not match the spatial grid");
    }
    for (double value : g) {
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument("density samples must be finite and nonnegative");
        }
    }
    AlphaField field(space, velocity);
    for (std::size_t i = 0; i < space.cell_count(); ++i) {
        const Vec x = space.center(i);
        for (std::size_t j = 0; j < velocity.size(); ++j) {
            if (!in_set(i, j)) continue;
            field(i, j) = g[space.locate(x + delta * velocity.node(j))];
        }
    }
    return field;
}

FieldStats field_stats(const AlphaField& field, const VelocityGrid& velocity,
                       const SpatialGrid& space) {
    FieldStats stats;
    if (field.size() == 0) return stats;
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = -std::numeric_limits<double>::infinity();
    std::size_t positive = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < field.cells(); ++i) {
        const auto row = field.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            stats.min = std::min(stats.min, row[j]);
            stats.max = std::max(stats.max, row[j]);
            if (row[j] > 0.0) ++positive;
            sum += row[j] * velocity.weight(j);
        }
    }
    stats.total_mass = velocity.kappa() * sum * space.cell_volume();
    stats.support_fraction = static_cast<double>(positive) / static_cast<double>(field.size());
    return stats;
}

}  // namespace selfmix
