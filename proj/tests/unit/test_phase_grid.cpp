#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "selfmix/phase_grid.hpp"
#include "test_support.hpp"

using namespace selfmix;
using selfmix::testing::Gen;

TEST(SpatialGrid, RejectsBadShapes) {
    EXPECT_THROW(SpatialGrid(3, {4, 4}, 0.1), std::invalid_argument);
    EXPECT_THROW(SpatialGrid(1, {3, 1}, 0.1), std::invalid_argument);
    EXPECT_THROW(SpatialGrid(2, {8, 3}, 0.1), std::invalid_argument);
    EXPECT_THROW(SpatialGrid(1, {8, 1}, 0.0), std::invalid_argument);
    EXPECT_NO_THROW(SpatialGrid(2, {4, 4}, 0.5));
}

TEST(SpatialGrid, VolumesAndCenters) {
    SpatialGrid g(2, {4, 5}, 0.5, Boundary::periodic, {1.0, -1.0});
    EXPECT_EQ(g.cell_count(), 20u);
    EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
    EXPECT_DOUBLE_EQ(g.volume(), 5.0);
    const auto c = g.center(g.index(1, 2));
    EXPECT_DOUBLE_EQ(c[0], 1.75);
    EXPECT_DOUBLE_EQ(c[1], 0.25);
    EXPECT_DOUBLE_EQ(g.domain_center()[0], 2.0);
    EXPECT_DOUBLE_EQ(g.domain_center()[1], 0.25);
}

TEST(SpatialGrid, NeighborWrapsOrClamps) {
    auto p = SpatialGrid::line(4, 1.0);
    EXPECT_EQ(p.neighbor(0, 0, -1), 3u);
    EXPECT_EQ(p.neighbor(3, 0, +1), 0u);
    auto o = SpatialGrid::line(4, 1.0, Boundary::outflow);
    EXPECT_EQ(o.neighbor(0, 0, -1), 0u);
    EXPECT_EQ(o.neighbor(3, 0, +1), 3u);
    EXPECT_TRUE(o.beyond_boundary(0, 0, -1));
    EXPECT_FALSE(p.beyond_boundary(0, 0, -1));
    EXPECT_EQ(p.locate({-0.5, 0.0}), 3u);
    EXPECT_EQ(o.locate({-0.5, 0.0}), 0u);
    EXPECT_EQ(p.locate({4.25, 0.0}), 0u);
}

TEST(VelocityGrid, OneDimensionalLattices) {
    auto g4 = build_velocity_grid(1, 1.0, 4);
    ASSERT_EQ(g4.size(), 4u);
    const double expect[] = {-0.75, -0.25, 0.25, 0.75};
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_DOUBLE_EQ(g4.node(j)[0], expect[j]);
        EXPECT_DOUBLE_EQ(g4.weight(j), 0.5);
    }
    auto g2 = build_velocity_grid(1, 1.0, 2);
    ASSERT_EQ(g2.size(), 2u);
    EXPECT_DOUBLE_EQ(g2.node(0)[0], -0.5);
    EXPECT_DOUBLE_EQ(g2.node(1)[0], 0.5);
    EXPECT_DOUBLE_EQ(g2.total_weight(), 2.0);
}

TEST(VelocityGrid, TwoDimensionalClipping) {
    auto g3 = build_velocity_grid(2, 1.0, 3);
    EXPECT_EQ(g3.size(), 9u);
    EXPECT_EQ(build_velocity_grid(2, 1.0, 7).size(), 37u);
    EXPECT_EQ(build_velocity_grid(2, 1.0, 8).size(), 52u);
    const auto g8 = build_velocity_grid(2, 1.0, 8);
    for (const auto& a : g8.nodes()) EXPECT_LE(norm(a), 1.0);
}

TEST(VelocityGrid, TotalWeightApproachesBallVolume) {
    const double area = std::numbers::pi;
    auto coarse = build_velocity_grid(2, 1.0, 16);
    auto fine = build_velocity_grid(2, 1.0, 128);
    EXPECT_LT(std::abs(fine.total_weight() - area), std::abs(coarse.total_weight() - area) + 1e-12);
    // one lattice shell: perimeter 2π times the cell width
    EXPECT_LT(std::abs(fine.total_weight() - area), 2.0 * std::numbers::pi * (2.0 / 128));
}

TEST(VelocityGrid, SymmetricUnderReflection) {
    for (int dim : {1, 2}) {
        for (int n : {1, 2, 5, 8, 11}) {
            auto g = build_velocity_grid(dim, 1.3, n);
            for (std::size_t j = 0; j < g.size(); ++j) {
                bool found = false;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    if (g.node(k)[0] == -g.node(j)[0] && g.node(k)[1] == -g.node(j)[1] &&
                        g.weight(k) == g.weight(j)) {
                        found = true;
                    }
                }
                EXPECT_TRUE(found) << "dim " << dim << " n " << n << " node " << j;
            }
        }
    }
}

TEST(VelocityGrid, Validation) {
    EXPECT_THROW(build_velocity_grid(3, 1.0, 4), std::invalid_argument);
    EXPECT_THROW(build_velocity_grid(1, 0.0, 4), std::invalid_argument);
    EXPECT_THROW(build_velocity_grid(1, 1.0, 0), std::invalid_argument);
    EXPECT_THROW(build_velocity_grid(1, 1.0, 4, 0.0), std::invalid_argument);
    EXPECT_THROW(VelocityGrid(1, {{2.0, 0.0}}, {1.0}, 1.0), std::invalid_argument);
    EXPECT_THROW(VelocityGrid(1, {{0.5, 0.0}}, {0.0}, 1.0), std::invalid_argument);
}

TEST(KappaFromScales, Examples) {
    EXPECT_NEAR(kappa_from_scales(1.0, 1.0), 0.238732414637843, 1e-12);
    EXPECT_EQ(kappa_from_scales(0.0, 1.0), 0.0);
    EXPECT_NEAR(kappa_from_scales(2.0, 1.0), 1.909859317102744, 1e-12);
    EXPECT_THROW(kappa_from_scales(1.0, 0.0), std::invalid_argument);
}

TEST(AlphaDensityFromTransport, ConstantAndEmptySupport) {
    auto space = SpatialGrid::line(6, 0.5);
    auto vel = build_velocity_grid(1, 1.0, 4);
    CellField g(6, 2.5);
    auto all = alpha_density_from_transport(g, [](std::size_t, std::size_t) { return true; }, 0.3, space, vel);
    for (double v : all.values()) EXPECT_EQ(v, 2.5);
    auto some = alpha_density_from_transport(
        g, [](std::size_t cell, std::size_t) { return cell != 2; }, 0.3, space, vel);
    for (double v : some.row(2)) EXPECT_EQ(v, 0.0);
    for (double v : some.row(3)) EXPECT_EQ(v, 2.5);
}

TEST(AlphaDensityFromTransport, SpikeShiftsByOneCell) {
    // node 1.0 with Δ = h moves the sample point exactly one cell
    auto space = SpatialGrid::line(8, 0.25);
    auto vel = selfmix::testing::line_velocity({-1.0, 1.0}, 1.0);
    CellField g(8, 0.0);
    g[3] = 7.0;
    auto f = alpha_density_from_transport(g, [](std::size_t, std::size_t) { return true; }, 0.25, space, vel);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(f(i, 1), i == 2 ? 7.0 : 0.0) << i;
        EXPECT_EQ(f(i, 0), i == 4 ? 7.0 : 0.0) << i;
    }
    g.assign(8, 0.0);
    g[0] = 1.0;
    auto wrapped = alpha_density_from_transport(g, [](std::size_t, std::size_t) { return true; }, 0.25, space, vel);
    EXPECT_EQ(wrapped(7, 1), 1.0);
}

TEST(AlphaDensityFromTransport, SupportMatchesPredicate) {
    Gen gen(11);
    auto space = SpatialGrid(2, {5, 6}, 0.2);
    auto vel = build_velocity_grid(2, 1.0, 5);
    CellField g(space.cell_count());
    for (auto& v : g) v = gen.uniform(0.1, 1.0);
    auto pred = [](std::size_t cell, std::size_t node) { return (cell + node) % 3 != 0; };
    auto f = alpha_density_from_transport(g, pred, 0.37, space, vel);
    for (std::size_t i = 0; i < f.cells(); ++i) {
        for (std::size_t j = 0; j < f.nodes(); ++j) {
            EXPECT_GE(f(i, j), 0.0);
            EXPECT_EQ(f(i, j) > 0.0, pred(i, j));
        }
    }
}

TEST(FieldStats, Examples) {
    auto space = SpatialGrid::line(4, 0.25);
    auto vel = build_velocity_grid(1, 1.0, 2);
    AlphaField zero(space, vel);
    EXPECT_EQ(field_stats(zero, vel, space).total_mass, 0.0);
    AlphaField ones(space, vel, 1.0);
    EXPECT_DOUBLE_EQ(field_stats(ones, vel, space).total_mass, 2.0);
    EXPECT_DOUBLE_EQ(field_stats(ones, vel, space).support_fraction, 1.0);

    auto half = SpatialGrid::line(4, 0.5);
    auto v2 = VelocityGrid(1, {{-0.5, 0.0}, {0.5, 0.0}}, {0.5, 0.5}, 1.0, 2.0);
    AlphaField one(half, v2);
    one(0, 0) = 3.0;
    const auto s = field_stats(one, v2, half);
    EXPECT_DOUBLE_EQ(s.total_mass, 1.5);
    EXPECT_DOUBLE_EQ(s.max, 3.0);
    EXPECT_DOUBLE_EQ(s.support_fraction, 1.0 / 8.0);
}

TEST(FieldStats, QuadratureConsistency) {
    for (int dim : {1, 2}) {
        SpatialGrid space(dim, {6, dim == 2 ? 5u : 1u}, 0.3);
        auto vel = build_velocity_grid(dim, 0.9, 6, 1.7);
        AlphaField ones(space, vel, 1.0);
        const double expect = vel.kappa() * vel.total_weight() * space.volume();
        EXPECT_NEAR(field_stats(ones, vel, space).total_mass, expect, 1e-13 * expect);
    }
}

TEST(AlphaField, ValidateRejectsNegativeAndNonFinite) {
    AlphaField f(2, 2, 1.0);
    EXPECT_NO_THROW(f.validate());
    f(1, 1) = -1e-300;
    EXPECT_THROW(f.validate(), std::invalid_argument);
    f(1, 1) = std::nan("");
    EXPECT_THROW(f.validate(), std::invalid_argument);
}
