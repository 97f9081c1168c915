#include "selfmix/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfmix {

namespace {

constexpr double kVacuumFraction = 1e-14;

Vec impulse_of(const PhaseArray& values, const SpatialGrid& space, const VelocityGrid& velocity) {
    Vec sum{0.0, 0.0};
    for (std::size_t i = 0; i < values.cells(); ++i) {
        const auto row = values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) sum += (velocity.weight(j) * row[j]) * velocity.node(j);
    }
    const double c = velocity.kappa() * space.cell_volume();
    return c * sum;
}

double l1(const Vec& v) { return std::abs(v[0]) + std::abs(v[1]); }

}  // namespace

std::vector<double> mass_density(const AlphaField& field, const VelocityGrid& velocity) {
    std::vector<double> rho(field.cells(), 0.0);
    for (std::size_t i = 0; i < field.cells(); ++i) {
        const auto row = field.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) s += velocity.weight(j) * row[j];
        rho[i] = velocity.kappa() * s;
    }
    return rho;
}

std::vector<Vec> mean_velocity(const AlphaField& field, const VelocityGrid& velocity) {
    std::vector<double> denom(field.cells(), 0.0);
    std::vector<Vec> numer(field.cells(), Vec{0.0, 0.0});
    double peak = 0.0;
    for (std::size_t i = 0; i < field.cells(); ++i) {
        const auto row = field.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double m = velocity.weight(j) * row[j];
            denom[i] += m;
            numer[i] += m * velocity.node(j);
        }
        peak = std::max(peak, denom[i]);
    }
    std::vector<Vec> v(field.cells(), Vec{0.0, 0.0});
    const double threshold = kVacuumFraction * peak;
    for (std::size_t i = 0; i < field.cells(); ++i) {
        if (denom[i] > threshold) v[i] = (1.0 / denom[i]) * numer[i];
    }
    return v;
}

Vec total_impulse(const AlphaField& field, const SpatialGrid& space, const VelocityGrid& velocity) {
    return impulse_of(field, space, velocity);
}

double angular_momentum(const AlphaField& field, const SpatialGrid& space,
                        const VelocityGrid& velocity) {
    if (space.dim() == 1) return 0.0;
    const Vec center = space.domain_center();
    double sum = 0.0;
    for (std::size_t i = 0; i < field.cells(); ++i) {
        const Vec x = space.center(i) - center;
        const auto row = field.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            sum += velocity.weight(j) * row[j] * cross(x, velocity.node(j));
        }
    }
    return velocity.kappa() * space.cell_volume() * sum;
}

std::vector<double> energy_update(const std::vector<double>& eps_rho, const AlphaField& before,
                                  const PhaseArray& increment, double dt, const SpatialGrid& space,
                                  const VelocityGrid& velocity, const MixerParams& params) {
    if (eps_rho.size() != before.cells() || !increment.same_shape(before) ||
        before.nodes() != velocity.size() || before.cells() != space.cell_count()) {
        throw std::invalid_argument("energy_update: shape mismatch");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("energy_update: time step must be positive");

    const auto adv = advection_term(before, space, velocity);
    const auto diff = diffusion_term(before, space, params.E);
    std::vector<double> out(eps_rho);
    for (std::size_t i = 0; i < before.cells(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < before.nodes(); ++j) {
            const Vec& a = velocity.node(j);
            const double work = dot(a, params.gravity) * before(i, j);
            const double transport = adv(i, j) - diff(i, j) + 0.5 * increment(i, j) / dt;
            s += velocity.weight(j) * (work - dot(a, a) * transport);
        }
        out[i] += dt * velocity.kappa() * s;
    }
    return out;
}

double energy_integral(const std::vector<double>& eps_rho, const SpatialGrid& space) {
    double s = 0.0;
    for (double e : eps_rho) s += e;
    return s * space.cell_volume();
}

EulerFields euler_fields(const AlphaField& field, const VelocityGrid& velocity,
                         std::vector<double> eps_rho) {
    EulerFields out;
    out.rho = mass_density(field, velocity);
    out.v = mean_velocity(field, velocity);
    out.eps_rho = std::move(eps_rho);
    out.t = field.t;
    return out;
}

ImpulseBudget impulse_budget(const AlphaField& before, const SolverState& after,
                             const Problem& problem) {
    const auto& space = problem.space;
    const auto& vel = problem.velocity;
    const double dt = after.last_dt;
    if (!(dt > 0.0) || after.stages.empty()) {
        throw std::invalid_argument("impulse_budget needs a state produced by a solver step");
    }
    if (!after.last_increment.same_shape(before)) {
        throw std::invalid_argument("impulse_budget: shape mismatch");
    }

    ImpulseBudget b;
    const double cell = space.cell_volume();
    const double kg = vel.kappa();
    const double km = problem.mixer.kappa;
    const std::size_t n = vel.size();

    b.observed_rate = (1.0 / dt) * impulse_of(after.last_increment, space, vel);
    double scale = 0.0;
    for (std::size_t i = 0; i < before.cells(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scale += kg * cell * vel.weight(j) * norm(vel.node(j)) * std::abs(after.last_increment(i, j)) / dt;
        }
    }

    const auto weights = stage_weights(after.last_integrator);
    for (std::size_t s = 0; s < after.stages.size(); ++s) {
        const auto& rho = after.stages[s];
        Vec transfer{0.0, 0.0};
        double magnitude = 0.0;
        if (km != 0.0) {
            for (std::size_t i = 0; i < rho.cells(); ++i) {
                const auto row = rho.row(i);
                for (std::size_t j = 0; j < n; ++j) {
                    for (std::size_t k = 0; k < n; ++k) {
                        if (k == j) continue;
                        const double m = mass_mixer_M(row[j], row[k], vel.node(j), vel.node(k), problem.mixer);
                        const Vec J = impulse_mixer_J(vel.node(j), m);
                        const double wjk = vel.weight(j) * vel.weight(k);
                        transfer += wjk * J;
                        magnitude += wjk * l1(J);
                    }
                }
            }
        }
        const double c = weights[s] * kg * km * cell;
        b.mixer_transfer += c * transfer;
        scale += c * magnitude;

        if (space.boundary() == Boundary::outflow) {
            const auto inflow = boundary_inflow(rho, problem);
            Vec flux{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) flux += (vel.weight(j) * inflow[j]) * vel.node(j);
            b.boundary_flux += (weights[s] * kg) * flux;
        }
    }

    Vec force{0.0, 0.0};
    for (std::size_t i = 0; i < before.cells(); ++i) {
        for (std::size_t j = 0; j < n; ++j) force += (vel.weight(j) * before(i, j)) * problem.mixer.gravity;
    }
    b.force = (kg * cell) * force;

    b.residual = b.observed_rate - b.mixer_transfer - b.boundary_flux - b.force;
    b.scale = scale + l1(b.boundary_flux) + l1(b.force);
    const double r = norm(b.residual);
    b.relative = b.scale > 0.0 ? r / b.scale : r;
    return b;
}

}  // namespace selfmix
