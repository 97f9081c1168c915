#include "selfmix/driver/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "selfmix/driver/io.hpp"

namespace selfmix::driver {

CellField gaussian_profile(const SpatialGrid& space) {
    const double sigma = 0.1 * space.h() * static_cast<double>(space.cells_along(0));
    const Vec c = space.domain_center();
    CellField n(space.cell_count());
    for (std::size_t i = 0; i < n.size(); ++i) {
        const Vec d = space.center(i) - c;
        n[i] = std::exp(-dot(d, d) / (2.0 * sigma * sigma));
    }
    return n;
}

std::vector<double> maxwellian(const VelocityGrid& velocity, const Vec& u, double s) {
    std::vector<double> f(velocity.size());
    double total = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const Vec d = velocity.node(j) - u;
        f[j] = std::exp(-dot(d, d) / (2.0 * s * s));
        total += velocity.weight(j) * f[j];
    }
    for (auto& v : f) v /= total;
    return f;
}

AlphaField product_field(const CellField& n, const std::vector<double>& f) {
    AlphaField field(n.size(), f.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        for (std::size_t j = 0; j < f.size(); ++j) field(i, j) = n[i] * f[j];
    }
    return field;
}

AlphaField gaussian_blob(const SpatialGrid& space, const VelocityGrid& velocity) {
    const double R = velocity.radius();
    return product_field(gaussian_profile(space), maxwellian(velocity, {0.3 * R, 0.0}, 0.3 * R));
}

AlphaField two_stream(const SpatialGrid& space, const VelocityGrid& velocity, std::uint64_t seed) {
    const double R = velocity.radius();
    const auto plus = maxwellian(velocity, {0.5 * R, 0.0}, 0.15 * R);
    const auto minus = maxwellian(velocity, {-0.5 * R, 0.0}, 0.15 * R);
    std::vector<double> f(velocity.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = 0.5 * (plus[j] + minus[j]);

    const double L = space.h() * static_cast<double>(space.cells_along(0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    CellField n(space.cell_count());
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double x = space.center(i)[0] - space.origin()[0];
        n[i] = (1.0 + 0.2 * std::cos(2.0 * std::numbers::pi * x / L)) * (1.0 + 0.01 * noise(rng));
    }
    return product_field(n, f);
}

AlphaField single_node_blob(const SpatialGrid& space, const VelocityGrid& velocity, std::size_t node) {
    std::vector<double> f(velocity.size(), 0.0);
    f.at(node) = 1.0 / velocity.weight(node);
    return product_field(gaussian_profile(space), f);
}

AlphaField initial_field(const RunConfig& config, const Problem& problem) {
    switch (config.scenario) {
    case Scenario::two_stream: return two_stream(problem.space, problem.velocity, config.seed);
    case Scenario::gaussian_blob: return gaussian_blob(problem.space, problem.velocity);
    case Scenario::laminar_limit:
        return single_node_blob(problem.space, problem.velocity, laminar_node(problem.velocity));
    case Scenario::custom: {
        AlphaField field;
        try {
            field = read_snapshot(config.init_file, problem.space, problem.velocity);
        } catch (const std::exception& e) {
            throw ConfigError("init_file", e.what());
        }
        field.t = 0.0;
        try {
            field.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("init_file", e.what());
        }
        return field;
    }
    }
    throw ConfigError("scenario", "unsupported");
}

}  // namespace selfmix::driver
