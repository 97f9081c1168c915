#include "selfmix/portions.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace selfmix {

namespace {

SupportSet from_marks(const std::vector<char>& marks, double threshold) {
    SupportSet s;
    s.threshold = threshold;
    for (std::size_t i = 0; i < marks.size(); ++i) {
        if (marks[i]) s.cells.push_back(i);
    }
    return s;
}

/// Right-hand side of every tag for one stage snapshot of ρ.
void tag_rates(const PhaseArray& rho, const std::vector<const PhaseArray*>& tags,
               std::vector<PhaseArray>& out, const Problem& problem, const MixingKernel& kernel) {
    const auto& vel = problem.velocity;
    const std::size_t n = vel.size();
    for (std::size_t t = 0; t < tags.size(); ++t) {
        if (!out[t].same_shape(rho)) out[t] = PhaseArray(rho.cells(), rho.nodes());
        std::fill(out[t].values().begin(), out[t].values().end(), 0.0);
    }

    const double km = problem.mixer.kappa;
    if (km != 0.0) {
        std::vector<double> share(n);
        for (std::size_t i = 0; i < rho.cells(); ++i) {
            const auto r = rho.row(i);
            for (std::size_t t = 0; t < tags.size(); ++t) {
                const auto tag = tags[t]->row(i);
                for (std::size_t j = 0; j < n; ++j) {
                    share[j] = r[j] > 0.0 ? std::clamp(tag[j] / r[j], 0.0, 1.0) : 0.0;
                }
                auto o = out[t].row(i);
                kernel.for_each_pair(r, [&](std::size_t j, std::size_t k, double m) {
                    if (m == 0.0) return;
                    // m > 0: node j gains from node k, so k is the source
                    const double moved = m * (m > 0.0 ? share[k] : share[j]);
                    o[j] += vel.weight(k) * moved;
                    o[k] -= vel.weight(j) * moved;
                });
                for (auto& v : o) v *= km;
            }
        }
    }
    for (std::size_t t = 0; t < tags.size(); ++t) {
        add_advection(*tags[t], problem.space, vel, -1.0, out[t]);
        add_diffusion(*tags[t], problem.space, problem.mixer.E, out[t]);
    }
}

}  // namespace

bool SupportSet::contains(std::size_t cell) const {
    return std::binary_search(cells.begin(), cells.end(), cell);
}

bool SupportSet::subset_of(const SupportSet& other) const {
    return std::includes(other.cells.begin(), other.cells.end(), cells.begin(), cells.end());
}

std::vector<std::size_t> velocity_support(const AlphaField& field, std::size_t cell, double tau) {
    if (tau < 0.0) throw std::invalid_argument("support threshold must be nonnegative");
    const auto all = field.values();
    const double peak = all.empty() ? 0.0 : *std::max_element(all.begin(), all.end());
    const double cut = tau * peak;
    std::vector<std::size_t> nodes;
    const auto row = field.row(cell);
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] > cut) nodes.push_back(j);
    }
    return nodes;
}

std::vector<std::vector<std::size_t>> velocity_supports(const AlphaField& field, double tau) {
    std::vector<std::vector<std::size_t>> out(field.cells());
    for (std::size_t i = 0; i < field.cells(); ++i) out[i] = velocity_support(field, i, tau);
    return out;
}

PortionTag seed_portion(const AlphaField& field, const SpatialGrid& space,
                        const VelocityGrid& velocity, const CellPredicate& region,
                        const NodePredicate& nodes) {
    if (field.cells() != space.cell_count() || field.nodes() != velocity.size()) {
        throw std::invalid_argument("seed_portion: shape mismatch");
    }
    PortionTag tag{PhaseArray(field.cells(), field.nodes())};
    std::size_t selected = 0;
    std::vector<char> node_mask(field.nodes(), 1);
    if (nodes) {
        for (std::size_t j = 0; j < field.nodes(); ++j) node_mask[j] = nodes(j, velocity.node(j)) ? 1 : 0;
    }
    for (std::size_t i = 0; i < field.cells(); ++i) {
        if (!region(i, space.center(i))) continue;
        ++selected;
        for (std::size_t j = 0; j < field.nodes(); ++j) {
            if (node_mask[j]) tag.values(i, j) = field(i, j);
        }
    }
    if (selected == 0) throw std::invalid_argument("portion region selects no cell");
    return tag;
}

void evolve_tags(std::span<PortionTag> tags, const SolverState& after, const Problem& problem) {
    if (tags.empty()) return;
    if (problem.boundary_b) {
        throw std::invalid_argument("portion tracking requires the boundary mixer to be off (b = 0)");
    }
    if (after.stages.empty() || !(after.last_dt > 0.0)) {
        throw std::invalid_argument("evolve_tags needs a state produced by a solver step");
    }
    for (const auto& tag : tags) {
        if (!tag.values.same_shape(after.field)) throw std::invalid_argument("tag shape mismatch");
    }

    const MixingKernel kernel(problem.velocity, problem.mixer);
    const double dt = after.last_dt;
    const std::size_t count = tags.size();
    std::vector<PhaseArray> rates(count);

    std::vector<PhaseArray> start(count);
    std::vector<const PhaseArray*> current(count);
    for (std::size_t t = 0; t < count; ++t) {
        start[t] = tags[t].values;
        current[t] = &start[t];
    }

    tag_rates(after.stages[0], current, rates, problem, kernel);
    std::vector<PhaseArray> next = start;
    for (std::size_t t = 0; t < count; ++t) {
        auto v = next[t].values();
        const auto r = rates[t].values();
        for (std::size_t n = 0; n < v.size(); ++n) v[n] += dt * r[n];
    }

    if (after.last_integrator == Integrator::rk2) {
        if (after.stages.size() < 2) throw std::invalid_argument("rk2 step is missing its second stage");
        for (std::size_t t = 0; t < count; ++t) current[t] = &next[t];
        tag_rates(after.stages[1], current, rates, problem, kernel);
        for (std::size_t t = 0; t < count; ++t) {
            auto v = next[t].values();
            const auto r = rates[t].values();
            const auto s = start[t].values();
            for (std::size_t n = 0; n < v.size(); ++n) v[n] = 0.5 * s[n] + 0.5 * (v[n] + dt * r[n]);
        }
    }

    for (std::size_t t = 0; t < count; ++t) tags[t].values = std::move(next[t]);
}

double tagged_mass(const PortionTag& tag, const SpatialGrid& space, const VelocityGrid& velocity) {
    double s = 0.0;
    for (std::size_t i = 0; i < tag.values.cells(); ++i) {
        const auto row = tag.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) s += velocity.weight(j) * row[j];
    }
    return velocity.kappa() * space.cell_volume() * s;
}

SupportSet covering_set(const PortionTag& tag, const VelocityGrid& velocity, double tau) {
    if (tau < 0.0) throw std::invalid_argument("support threshold must be nonnegative");
    const auto& values = tag.values;
    std::vector<double> cell_mass(values.cells(), 0.0);
    double peak = 0.0;
    for (std::size_t i = 0; i < values.cells(); ++i) {
        const auto row = values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) cell_mass[i] += velocity.weight(j) * row[j];
        peak = std::max(peak, cell_mass[i]);
    }
    SupportSet s;
    s.threshold = tau;
    if (peak <= 0.0) return s;
    for (std::size_t i = 0; i < values.cells(); ++i) {
        if (cell_mass[i] > tau * peak) s.cells.push_back(i);
    }
    return s;
}

SupportSet predict_set_propagation(const SupportSet& support,
                                   const std::vector<std::vector<std::size_t>>& velocity_sets,
                                   const SpatialGrid& space, const VelocityGrid& velocity,
                                   double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("propagation horizon must be positive");
    if (velocity_sets.size() != space.cell_count()) {
        throw std::invalid_argument("need one velocity set per cell");
    }
    std::vector<char> marks(space.cell_count(), 0);
    for (std::size_t y : support.cells) {
        const Vec origin = space.center(y);
        for (std::size_t j : velocity_sets[y]) {
            const Vec x = origin + delta * velocity.node(j);
            if (space.boundary() == Boundary::outflow) {
                bool inside = true;
                for (int axis = 0; axis < space.dim(); ++axis) {
                    const double s = (x[axis] - space.origin()[axis]) / space.h();
                    inside = inside && s >= 0.0 && s < static_cast<double>(space.cells_along(axis));
                }
                if (!inside) continue;
            }
            marks[space.locate(x)] = 1;
        }
    }
    return from_marks(marks, support.threshold);
}

SupportSet dilate(const SupportSet& set, const SpatialGrid& space, int radius) {
    std::vector<char> marks(space.cell_count(), 0);
    const int ry = space.dim() == 2 ? radius : 0;
    for (std::size_t c : set.cells) {
        for (int dy = -ry; dy <= ry; ++dy) {
            if (space.beyond_boundary(c, 1, dy)) continue;
            const std::size_t row = dy == 0 ? c : space.neighbor(c, 1, dy);
            for (int dx = -radius; dx <= radius; ++dx) {
                if (space.beyond_boundary(row, 0, dx)) continue;
                marks[dx == 0 ? row : space.neighbor(row, 0, dx)] = 1;
            }
        }
    }
    return from_marks(marks, set.threshold);
}

double overlap_measure(const SupportSet& a, const SupportSet& b, const SpatialGrid& space) {
    std::vector<std::size_t> common;
    std::set_intersection(a.cells.begin(), a.cells.end(), b.cells.begin(), b.cells.end(),
                          std::back_inserter(common));
    return static_cast<double>(common.size()) * space.cell_volume();
}

}  // namespace selfmix
