#include <cmath>

#include <gtest/gtest.h>

#include "selfmix/moments.hpp"
#include "test_support.hpp"

using namespace selfmix;
using selfmix::testing::Gen;
using selfmix::testing::line_velocity;

TEST(MassDensity, Examples) {
    auto vel = line_velocity({-0.5, 0.5}, 1.0);
    AlphaField f(4, 2);
    EXPECT_EQ(mass_density(f, vel)[0], 0.0);
    f(1, 0) = 2.0;
    f(1, 1) = 3.0;
    EXPECT_DOUBLE_EQ(mass_density(f, vel)[1], 5.0);
    EXPECT_DOUBLE_EQ(mass_density(f, vel.with_kappa(2.0))[1], 10.0);
}

TEST(MeanVelocity, Examples) {
    auto vel = line_velocity({-0.5, 0.5}, 1.0);
    AlphaField f(4, 2);
    f(0, 0) = f(0, 1) = 0.7;
    f(1, 1) = 2.0;
    f(2, 0) = 1.0;
    f(2, 1) = 3.0;
    const auto v = mean_velocity(f, vel);
    EXPECT_EQ(v[0][0], 0.0);
    EXPECT_DOUBLE_EQ(v[1][0], 0.5);
    EXPECT_DOUBLE_EQ(v[2][0], 0.25);
    EXPECT_EQ(v[3][0], 0.0);  // vacuum
}

TEST(MeanVelocity, VacuumThresholdAndScaleInvariance) {
    Gen gen(20);
    auto vel = build_velocity_grid(2, 1.0, 5);
    auto f = gen.field(12, vel.size(), 0.3);
    for (std::size_t j = 0; j < vel.size(); ++j) f(5, j) = 1e-20;
    const auto v = mean_velocity(f, vel);
    EXPECT_EQ(v[5][0], 0.0);
    EXPECT_EQ(v[5][1], 0.0);
    AlphaField g = f;
    for (auto& x : g.values()) x *= 3.7;
    const auto w = mean_velocity(g, vel);
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_NEAR(v[i][0], w[i][0], 1e-14);
        EXPECT_NEAR(v[i][1], w[i][1], 1e-14);
    }
}

TEST(TotalImpulse, Examples) {
    SpatialGrid space(2, {4, 4}, 0.5);
    VelocityGrid vel(2, {{1.0, 0.0}, {-1.0, 0.0}}, {0.5, 0.5}, 1.0);
    AlphaField f(space, vel);
    f(0, 0) = 1.0;
    const Vec imp = total_impulse(f, space, vel);
    EXPECT_DOUBLE_EQ(imp[0], 0.125);
    EXPECT_EQ(imp[1], 0.0);
    f(0, 1) = 1.0;
    EXPECT_EQ(total_impulse(f, space, vel)[0], 0.0);
}

TEST(Moments, LinearInRho) {
    Gen gen(21);
    SpatialGrid space(2, {5, 4}, 0.3);
    auto vel = build_velocity_grid(2, 1.0, 4, 1.3);
    auto a = gen.field(20, vel.size());
    auto b = gen.field(20, vel.size());
    AlphaField sum = a;
    for (std::size_t n = 0; n < sum.size(); ++n) sum.values()[n] = 2.0 * a.values()[n] + b.values()[n];
    const Vec ia = total_impulse(a, space, vel);
    const Vec ib = total_impulse(b, space, vel);
    const Vec is = total_impulse(sum, space, vel);
    EXPECT_NEAR(is[0], 2.0 * ia[0] + ib[0], 1e-13);
    EXPECT_NEAR(is[1], 2.0 * ia[1] + ib[1], 1e-13);
    EXPECT_NEAR(angular_momentum(sum, space, vel),
                2.0 * angular_momentum(a, space, vel) + angular_momentum(b, space, vel), 1e-13);
    const auto ma = mass_density(a, vel);
    const auto mb = mass_density(b, vel);
    const auto ms = mass_density(sum, vel);
    for (std::size_t i = 0; i < ms.size(); ++i) EXPECT_NEAR(ms[i], 2.0 * ma[i] + mb[i], 1e-13);
}

TEST(AngularMomentum, Examples) {
    SpatialGrid space(2, {5, 5}, 1.0, Boundary::periodic, {-2.5, -2.5});
    VelocityGrid vel(2, {{0.0, 1.0}, {0.0, -1.0}}, {0.2, 0.2}, 1.0);
    AlphaField f(space, vel);
    EXPECT_EQ(angular_momentum(f, space, vel), 0.0);
    f(space.index(3, 2), 0) = 1.0;  // x = (1, 0), α = (0, 1)
    EXPECT_DOUBLE_EQ(angular_momentum(f, space, vel), 0.2);
    // point reflection partner cancels
    f(space.index(1, 2), 1) = 1.0;
    EXPECT_NEAR(angular_momentum(f, space, vel), 0.4, 1e-15);
    AlphaField g(space, vel);
    g(space.index(3, 2), 0) = 1.0;
    g(space.index(1, 2), 1) = 1.0;
    g(space.index(1, 2), 0) = 1.0;
    g(space.index(3, 2), 1) = 1.0;
    EXPECT_NEAR(angular_momentum(g, space, vel), 0.0, 1e-15);
    auto line = SpatialGrid::line(4, 0.5);
    auto lv = line_velocity({1.0}, 1.0);
    EXPECT_EQ(angular_momentum(AlphaField(line, lv, 1.0), line, lv), 0.0);
}

TEST(EnergyUpdate, StationaryUniformStateIsUnchanged) {
    auto space = SpatialGrid::line(6, 0.2);
    auto vel = line_velocity({-0.5, 0.5}, 1.0);
    AlphaField f(space, vel, 1.0);
    PhaseArray inc(6, 2);
    const std::vector<double> eps(6, 0.3);
    MixerParams p;
    EXPECT_EQ(energy_update(eps, f, inc, 0.01, space, vel, p), eps);
}

TEST(EnergyUpdate, AllMechanismsOffIsBitIdentical) {
    Gen gen(22);
    auto space = SpatialGrid::line(6, 0.2);
    auto vel = line_velocity({0.0}, 1.0);
    auto f = gen.field(6, 1);
    PhaseArray inc(6, 1);
    for (auto& v : inc.values()) v = gen.uniform(-1.0, 1.0);
    std::vector<double> eps(6);
    for (auto& v : eps) v = gen.uniform(-1.0, 1.0);
    MixerParams p;
    p.gravity = {0.3, 0.0};
    EXPECT_EQ(energy_update(eps, f, inc, 0.01, space, vel, p), eps);
}

TEST(EnergyUpdate, PureTranslationClosedForm) {
    Gen gen(23);
    auto space = SpatialGrid::line(8, 0.125);
    const double a = 0.8;
    auto vel = line_velocity({a}, 1.0);
    MixerParams p;
    p.kappa = 0.0;
    auto prob = selfmix::testing::make_problem(space, vel, p);
    KineticSolver solver(prob);
    auto f = gen.field(8, 1, 0.0);
    auto state = make_state(f);
    const double dt = solver.stable_dt();
    solver.step(state, dt);
    const auto adv = advection_term(f, space, vel);
    const auto eps = energy_update(std::vector<double>(8, 0.0), f, state.last_increment, dt, space, vel, p);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(eps[i], dt * (-a * a * adv(i, 0) / 2.0), 1e-14);
}

TEST(EnergyUpdate, GravityTermVanishesForSymmetricRho) {
    auto space = SpatialGrid::line(4, 0.25);
    auto vel = line_velocity({-0.5, 0.5}, 1.0);
    AlphaField f(space, vel, 2.0);
    PhaseArray inc(4, 2);
    MixerParams p;
    p.gravity = {9.8, 0.0};
    const std::vector<double> eps(4, 0.0);
    for (double e : energy_update(eps, f, inc, 0.1, space, vel, p)) EXPECT_EQ(e, 0.0);
    for (std::size_t i = 0; i < 4; ++i) f(i, 1) = 3.0;
    EXPECT_NEAR(energy_update(eps, f, inc, 0.1, space, vel, p)[0], 0.1 * (9.8 * 0.5) * 1.0, 1e-12);
}

TEST(EnergyUpdate, ShapeMismatchThrows) {
    auto space = SpatialGrid::line(4, 0.25);
    auto vel = line_velocity({-0.5, 0.5}, 1.0);
    AlphaField f(space, vel, 1.0);
    EXPECT_THROW(energy_update(std::vector<double>(3, 0.0), f, PhaseArray(4, 2), 0.1, space, vel, {}),
                 std::invalid_argument);
    EXPECT_THROW(energy_update(std::vector<double>(4, 0.0), f, PhaseArray(4, 3), 0.1, space, vel, {}),
                 std::invalid_argument);
}

TEST(EulerFields, BundlesMoments) {
    Gen gen(24);
    auto vel = build_velocity_grid(1, 1.0, 4);
    auto f = gen.field(5, 4);
    f.t = 0.7;
    const auto e = euler_fields(f, vel, std::vector<double>(5, 0.1));
    EXPECT_EQ(e.rho, mass_density(f, vel));
    EXPECT_EQ(e.t, 0.7);
    EXPECT_EQ(e.eps_rho.size(), 5u);
    EXPECT_EQ(e.v.size(), 5u);
}

TEST(ImpulseBudget, ZeroFieldHasZeroResidual) {
    auto prob = selfmix::testing::make_problem(SpatialGrid::line(6, 0.2), build_velocity_grid(1, 1.0, 4));
    KineticSolver solver(prob);
    AlphaField zero(prob.space, prob.velocity);
    auto state = make_state(zero);
    solver.step(state, 0.01);
    const auto b = impulse_budget(zero, state, prob);
    EXPECT_EQ(b.residual[0], 0.0);
    EXPECT_EQ(b.relative, 0.0);
}

TEST(ImpulseBudget, TwoNodeMixerTransferExplainsImpulseChange) {
    auto prob = selfmix::testing::make_problem(SpatialGrid::line(4, 0.25), line_velocity({0.5, 1.0}, 0.5));
    AlphaField f(prob.space, prob.velocity);
    for (std::size_t i = 0; i < 4; ++i) {
        f(i, 0) = 1.0;
        f(i, 1) = 0.6;
    }
    KineticSolver solver(prob);
    auto state = make_state(f);
    solver.step(state, 1e-3);
    const auto b = impulse_budget(f, state, prob);
    // impulse rate: Σ_cells h Σ_j w_j α_j rate_j = 1 · 0.5 · (0.5 · -r + 1.0 · r), r = 0.5 · 0.1 / 1.1
    const double r = 0.5 * 0.1 / 1.1;
    EXPECT_NEAR(b.observed_rate[0], 0.5 * 0.5 * r, 1e-13);
    EXPECT_NEAR(b.mixer_transfer[0], b.observed_rate[0], 1e-13);
    EXPECT_GT(b.observed_rate[0], 0.0);
    EXPECT_LE(b.relative, 1e-12);
}

TEST(ImpulseBudget, HomogeneousMixingIsExact) {
    Gen gen(25);
    auto vel = build_velocity_grid(2, 1.0, 6);
    auto prob = selfmix::testing::make_problem(SpatialGrid(2, {4, 4}, 0.25), vel);
    std::vector<double> row(vel.size());
    for (auto& v : row) v = gen.density(0.0);
    AlphaField f(prob.space, vel);
    for (std::size_t i = 0; i < f.cells(); ++i) {
        for (std::size_t j = 0; j < row.size(); ++j) f(i, j) = row[j];
    }
    KineticSolver solver(prob);
    for (auto integ : {Integrator::euler, Integrator::rk2}) {
        auto state = make_state(f);
        solver.step(state, solver.stable_dt(), integ);
        EXPECT_LE(impulse_budget(f, state, prob).relative, 1e-12);
    }
}

TEST(ImpulseBudget, PeriodicAndOutflowRuns) {
    Gen gen(26);
    for (auto boundary : {Boundary::periodic, Boundary::outflow}) {
        for (auto integ : {Integrator::euler, Integrator::rk2}) {
            MixerParams p;
            p.E = 0.01;
            auto prob = selfmix::testing::make_problem(SpatialGrid(2, {8, 6}, 0.125, boundary),
                                                       build_velocity_grid(2, 1.0, 5), p);
            SolverConfig cfg;
            cfg.integrator = integ;
            cfg.t_end = 0.3;
            AlphaField prev;
            KineticSolver(prob, cfg).run(gen.field(48, prob.velocity.size()),
                                         [&](const SolverState& s, const LedgerEntry&) {
                                             if (s.step_count > 0) {
                                                 EXPECT_LE(impulse_budget(prev, s, prob).relative, 1e-10);
                                             }
                                             prev = s.field;
                                         });
        }
    }
}

TEST(ImpulseBudget, GravityAppearsAsUnbalancedForce) {
    Gen gen(27);
    MixerParams p;
    p.gravity = {0.0, -1.0};
    auto prob = selfmix::testing::make_problem(SpatialGrid(2, {6, 6}, 0.2), build_velocity_grid(2, 1.0, 4), p);
    auto f = gen.field(36, prob.velocity.size());
    KineticSolver solver(prob);
    auto state = make_state(f);
    solver.step(state, solver.stable_dt());
    const auto b = impulse_budget(f, state, prob);
    const double mass = field_stats(f, prob.velocity, prob.space).total_mass;
    EXPECT_NEAR(b.force[1], -mass, 1e-12);
    EXPECT_NEAR(b.residual[1], mass, 1e-10);
}
