#include <cmath>

#include <gtest/gtest.h>

#include "selfmix/mixer.hpp"
#include "test_support.hpp"

using namespace selfmix;
using selfmix::testing::Gen;
using selfmix::testing::line_velocity;

TEST(SaturationR, Examples) {
    EXPECT_EQ(saturation_r(0.0), 0.0);
    EXPECT_DOUBLE_EQ(saturation_r(1.0), -0.5);
    EXPECT_DOUBLE_EQ(saturation_r(-1.0), 0.5);
}

TEST(SaturationR, OddBoundedMonotone) {
    Gen gen(1);
    double prev_r = saturation_r(-1e6);
    for (int n = 0; n < 20000; ++n) {
        const double d = gen.uniform(-50.0, 50.0) * std::pow(10.0, gen.uniform(-6.0, 2.0));
        const double r = saturation_r(d);
        EXPECT_EQ(r + saturation_r(-d), 0.0);
        EXPECT_LT(std::abs(r), 1.0);
        EXPECT_LE(r * d, 0.0);
    }
    for (double d = -1e3; d <= 1e3; d += 0.37) {
        const double r = saturation_r(d);
        EXPECT_LE(r, prev_r);
        prev_r = r;
    }
}

TEST(AngleFactor, Examples) {
    EXPECT_DOUBLE_EQ(angle_factor_phi({1.0, 2.0}, {1.0, 2.0}), 1.0);
    EXPECT_NEAR(angle_factor_phi({1.0, 2.0}, {-1.0, -2.0}), 0.0, 1e-15);
    EXPECT_NEAR(angle_factor_phi({1.0, 0.0}, {0.0, 1.0}), std::sqrt(0.5), 1e-15);
    EXPECT_EQ(angle_factor_phi({0.0, 0.0}, {1.0, 0.0}), 1.0);
    EXPECT_EQ(angle_factor_phi({0.0, 0.0}, {1.0, 0.0}, 0.25), 0.25);
}

TEST(AngleFactor, SymmetricAndBounded) {
    Gen gen(2);
    for (int n = 0; n < 20000; ++n) {
        const Vec a = gen.vec(3.0);
        const Vec b = gen.vec(3.0);
        const double p = angle_factor_phi(a, b);
        EXPECT_EQ(p, angle_factor_phi(b, a));
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(MassMixer, Examples) {
    MixerParams p;
    EXPECT_EQ(mass_mixer_M(0.7, 0.7, {1.0, 0.0}, {0.0, -1.0}, p), 0.0);
    const double m = mass_mixer_M(1.0, 0.6, {1.0, 0.0}, {2.0, 0.0}, p);
    EXPECT_NEAR(m, -1.0 / 6.0, 1e-15);
    EXPECT_NEAR(mass_mixer_M(0.6, 1.0, {2.0, 0.0}, {1.0, 0.0}, p), 1.0 / 6.0, 1e-15);
}

TEST(MassMixer, AntisymmetryAndSign) {
    Gen gen(3);
    MixerParams p;
    for (int n = 0; n < 100000; ++n) {
        const double ra = gen.density();
        const double rb = gen.density();
        const Vec a = gen.vec(2.0);
        const Vec b = gen.vec(2.0);
        p.D = gen.uniform(0.01, 10.0);
        const double mab = mass_mixer_M(ra, rb, a, b, p);
        const double mba = mass_mixer_M(rb, ra, b, a, p);
        EXPECT_EQ(mab + mba, 0.0);
        const double d = norm(b) * rb - norm(a) * ra;
        if (d >= 0.0) EXPECT_LE(mab, 0.0);
        // loss never exceeds the losing density
        if (mab < 0.0) EXPECT_LE(-mab, ra);
    }
}

TEST(MassMixer, RejectsBadParams) {
    MixerParams p;
    p.D = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.E = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.kappa = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(MixingIntegral, Examples) {
    MixerParams p;
    auto sym = line_velocity({-0.5, 0.5}, 1.0);
    const std::vector<double> uniform{0.8, 0.8};
    for (double r : mixing_integral(uniform, sym, p)) EXPECT_EQ(r, 0.0);

    auto two = line_velocity({0.5, 1.0}, 0.5);
    const std::vector<double> row{1.0, 0.6};
    const auto rates = mixing_integral(row, two, p);
    EXPECT_NEAR(rates[0], -0.5 * 0.1 / 1.1, 1e-15);
    EXPECT_NEAR(rates[1], 0.5 * 0.1 / 1.1, 1e-15);
    EXPECT_NEAR(rates[0], -0.0454545, 1e-7);
}

TEST(MixingIntegral, MassNeutralAndGainLossBounds) {
    Gen gen(4);
    auto vel = build_velocity_grid(2, 1.0, 8);
    MixerParams p;
    p.kappa = 1.7;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> row(vel.size());
        for (auto& v : row) v = gen.density(0.2);
        const auto rates = mixing_integral(row, vel, p);
        double net = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            net += vel.weight(j) * rates[j];
            scale += vel.weight(j) * std::abs(rates[j]);
            // loss bounded by κ Σ w ρ_j
            EXPECT_GE(rates[j], -p.kappa * vel.total_weight() * row[j] * (1.0 + 1e-12));
        }
        EXPECT_LE(std::abs(net), 1e-12 * std::max(scale, 1e-300));
    }
}

TEST(MixingKernel, MatchesPointwiseMixer) {
    Gen gen(5);
    auto vel = build_velocity_grid(2, 1.0, 6);
    MixerParams p;
    p.D = 2.5;
    MixingKernel kernel(vel, p);
    std::vector<double> row(vel.size());
    for (auto& v : row) v = gen.density();
    for (std::size_t j = 0; j < vel.size(); ++j) {
        for (std::size_t k = 0; k < vel.size(); ++k) {
            EXPECT_EQ(kernel.M(j, k, row[j], row[k]), mass_mixer_M(row[j], row[k], vel.node(j), vel.node(k), p));
        }
    }
    std::vector<double> fast(vel.size());
    kernel.rates(row, fast);
    for (std::size_t j = 0; j < vel.size(); ++j) {
        double naive = 0.0;
        for (std::size_t k = 0; k < vel.size(); ++k) {
            naive += vel.weight(k) * mass_mixer_M(row[j], row[k], vel.node(j), vel.node(k), p);
        }
        EXPECT_NEAR(fast[j], p.kappa * naive, 1e-14 * (1.0 + std::abs(naive)));
    }
}

TEST(MixingKernel, ZeroKappaDisablesMixing) {
    auto vel = line_velocity({0.5, 1.0}, 0.5);
    MixerParams p;
    p.kappa = 0.0;
    for (double r : mixing_integral(std::vector<double>{1.0, 0.6}, vel, p)) EXPECT_EQ(r, 0.0);
}

TEST(BoundaryMixer, Examples) {
    const Vec b0 = boundary_mixer_B(0.0, 0.0, {1.0, 0.0}, {2.0, 0.0}, 1.0);
    EXPECT_EQ(b0[0], 0.0);
    const Vec b1 = boundary_mixer_B(-1.0 / 6.0, 1.0 / 6.0, {1.0, 0.0}, {2.0, 0.0}, 1.0);
    EXPECT_NEAR(b1[0], 1.0 / 6.0, 1e-15);
    const Vec bz = boundary_mixer_B(-1.0 / 6.0, 1.0 / 6.0, {1.0, 0.0}, {2.0, 0.0}, 0.0);
    EXPECT_EQ(bz[0], 0.0);
    EXPECT_EQ(bz[1], 0.0);
    EXPECT_FALSE(constant_boundary_modulation(0.0));
    EXPECT_EQ(constant_boundary_modulation(1.0)(0, {1.0, 0.0}, {0.0, 1.0}), 1.0);
}

TEST(BoundaryMixer, EqualsDifferenceTimesMForAntisymmetricM) {
    Gen gen(6);
    for (int n = 0; n < 1000; ++n) {
        const Vec a = gen.vec(1.0);
        const Vec b = gen.vec(1.0);
        const double m = gen.uniform(-1.0, 1.0);
        const double s = gen.uniform(0.0, 2.0);
        const Vec B = boundary_mixer_B(m, -m, a, b, s);
        const Vec expect = (s * m) * (a - b);
        EXPECT_NEAR(B[0], expect[0], 1e-15);
        EXPECT_NEAR(B[1], expect[1], 1e-15);
    }
}

TEST(ImpulseMixer, Examples) {
    const Vec z = impulse_mixer_J({1.0, 1.0}, 0.0);
    EXPECT_EQ(z[0], 0.0);
    const Vec j = impulse_mixer_J({2.0, 0.0}, 0.25);
    EXPECT_EQ(j[0], 0.5);
    EXPECT_EQ(j[1], 0.0);
    const Vec a{0.3, -0.7};
    const Vec c = impulse_mixer_J(a, 0.4, -0.4 * a);
    EXPECT_EQ(c[0], 0.0);
    EXPECT_EQ(c[1], 0.0);
}
