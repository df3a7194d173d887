#include "polaron/form_factors.hpp"

#include <gtest/gtest.h>

using namespace polaron;

TEST(FormFactors, CouplingProfile) {
    const Grid g(3, 8, 10.0);
    const auto ff = build_form_factors(g, 1.0);
    const Mask live = coupled_modes(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double k = g.kabs()(i);
        if (!live(i) || k == 0.0) {
            EXPECT_EQ(ff.coupling(i), 0.0);
            EXPECT_EQ(ff.generator(i), 0.0);
            continue;
        }
        EXPECT_NEAR(ff.coupling(i), 1.0 / k, 1e-14);
        if (k < 1.0) {
            EXPECT_NEAR(ff.coupling_ir(i), 1.0 / k, 1e-14);
            EXPECT_EQ(ff.generator(i), 0.0);
        } else {
            EXPECT_EQ(ff.coupling_ir(i), 0.0);
            EXPECT_NEAR(ff.generator(i), -1.0 / (k * (1.0 + k * k)), 1e-14);
        }
    }
}

TEST(FormFactors, LiveModesAvoidEdgeAndCorners) {
    const Grid g(2, 8, two_pi);
    const Mask live = coupled_modes(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (g.nyquist_edge()(i) || g.kabs()(i) >= 4.0) {
            EXPECT_FALSE(live(i));
        }
    }
    // (3, 3) is inside the box but outside the ball of radius 4
    EXPECT_EQ(live.count(), 49 - 4);
}

TEST(FormFactors, GeneratorSplitsCoupling) {
    const Grid g(3, 12, 9.0);
    const auto ff = build_form_factors(g, 0.8);
    const RealField rebuilt = ff.coupling_ir - ff.generator * (1.0 + g.ksq());
    EXPECT_LT((rebuilt - ff.coupling).abs().maxCoeff(), 1e-14);
}

TEST(FormFactors, PairSymbol) {
    const Grid g(3, 8, 6.0);
    const auto ff = build_form_factors(g, 0.5);
    const RealField s = ff.generator.square() + 2.0 * ff.generator * ff.coupling;
    EXPECT_LT((ff.pair_symbol - s).abs().maxCoeff(), 1e-15);
    EXPECT_LE(ff.pair_symbol.maxCoeff(), 0.0);
}

TEST(FormFactors, PairPotentialOrigin) {
    const Grid g(3, 32, 16.0);
    const auto ff = build_form_factors(g, 0.5);
    // direct sum over the k-lattice, tests/oracles/freeze.py
    const double ref = -19.837612090188692;
    EXPECT_NEAR(ff.pair_potential(0), ref, 1e-11 * std::abs(ref));
    EXPECT_NEAR(ff.pair_potential(0), ff.pair_symbol.sum() * g.dk(), 1e-11);
}

TEST(FormFactors, PairPotentialIsEven) {
    const Grid g(3, 8, 5.0);
    const auto ff = build_form_factors(g, 0.7);
    for (Eigen::Index i = 0; i < g.size(); ++i)
        EXPECT_NEAR(ff.pair_potential(i), ff.pair_potential(g.reflect(i)), 1e-13);
    EXPECT_LE(ff.pair_potential.abs().maxCoeff(), std::abs(ff.pair_potential(0)) + 1e-13);
}

TEST(FormFactors, UltravioletCutoffIsMonotone) {
    const Grid g(3, 16, 8.0);
    double last_norm = 0.0;
    RealField last = RealField::Zero(g.size());
    for (double uv : {0.5, 1.0, 2.0, 4.0, no_cutoff}) {
        const auto ff = build_form_factors(g, 0.5, uv);
        EXPECT_TRUE((ff.generator.abs() >= last.abs() - 1e-15).all());
        const double n = ff.generator.square().sum();
        EXPECT_GE(n, last_norm);
        last_norm = n;
        last = ff.generator;
    }
}

TEST(FormFactors, EqualCutoffsGiveNoGenerator) {
    const Grid g(3, 8, 8.0);
    const auto ff = build_form_factors(g, 1.5, 1.5);
    EXPECT_EQ(ff.generator.abs().maxCoeff(), 0.0);
    EXPECT_EQ(ff.pair_potential.abs().maxCoeff(), 0.0);
}

TEST(FormFactors, RejectsBadCutoffs) {
    const Grid g(3, 8, 8.0);
    EXPECT_THROW(build_form_factors(g, 0.0), std::invalid_argument);
    EXPECT_THROW(build_form_factors(g, -1.0), std::invalid_argument);
    EXPECT_THROW(build_form_factors(g, 2.0, 1.0), std::invalid_argument);
}

TEST(FormFactors, InfraredBelowLattice) {
    const Grid g(3, 8, 8.0);
    EXPECT_TRUE(build_form_factors(g, 0.5).ir_below_lattice);
    EXPECT_FALSE(build_form_factors(g, 1.0).ir_below_lattice);
    EXPECT_EQ(build_form_factors(g, 0.5).coupling_ir.abs().maxCoeff(), 0.0);
}

TEST(FormFactors, ProfileDimensions) {
    const CutoffProfile one{1, 0.5, no_cutoff};
    EXPECT_DOUBLE_EQ(one.coupling(3.0), 1.0);
    const CutoffProfile two{2, 0.5, no_cutoff};
    EXPECT_DOUBLE_EQ(two.coupling(4.0), 0.5);
    EXPECT_DOUBLE_EQ(two.generator(4.0), -0.5 / 17.0);
    EXPECT_EQ(two.coupling(0.0), 0.0);
}
