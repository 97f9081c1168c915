#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "selfmix/kinetic_solver.hpp"

namespace selfmix::testing {

/// Seeded generator shared by the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    Vec vec(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

    /// Density that is exactly zero with probability `zeros`.
    double density(double zeros = 0.1) { return uniform(0.0, 1.0) < zeros ? 0.0 : uniform(0.0, 2.0); }

    AlphaField field(std::size_t cells, std::size_t nodes, double zeros = 0.1) {
        AlphaField f(cells, nodes);
        for (auto& v : f.values()) v = density(zeros);
        return f;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// 1D velocity grid with explicit nodes, e.g. {0.5, 1.0}.
inline VelocityGrid line_velocity(std::vector<double> speeds, double weight, double radius = 1.0,
                                  double kappa = 1.0) {
    std::vector<Vec> nodes;
    for (double s : speeds) nodes.push_back({s, 0.0});
    return VelocityGrid(1, nodes, std::vector<double>(speeds.size(), weight), radius, kappa);
}

inline Problem make_problem(SpatialGrid space, VelocityGrid velocity, MixerParams mixer = {}) {
    return Problem{std::move(space), std::move(velocity), mixer, {}};
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace selfmix::testing
