#include "polaron/dressing.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace polaron;

namespace {

struct Dressing : ::testing::Test {
    Grid g{3, 16, 12.0};
    FormFactors ff = build_form_factors(g, 0.5);
    PhasePoint z = fixtures::standard_state(g);
};

}  // namespace

TEST_F(Dressing, ZeroAngleIsIdentity) {
    EXPECT_EQ(distance(g, dressing_apply(g, ff, z, 0.0), z), 0.0);
}

TEST_F(Dressing, GroupLaw) {
    const PhasePoint a = dressing_apply(g, ff, dressing_apply(g, ff, z, 0.4), 0.35);
    const PhasePoint b = dressing_apply(g, ff, z, 0.75);
    EXPECT_LT(distance(g, a, b), 1e-12);
    const PhasePoint back = dressing_apply(g, ff, dressing_apply(g, ff, z, -1.0), 1.0);
    EXPECT_LT(distance(g, back, z), 1e-12);
}

TEST_F(Dressing, ModulusAndPhononShift) {
    const PhasePoint w = dressing_apply(g, ff, z, 1.0);
    EXPECT_LT((w.u.abs() - z.u.abs()).abs().maxCoeff(), 1e-14);
    const Field shift = ff.generator * density_transform(g, z.u);
    EXPECT_LT((w.alpha - z.alpha - shift).abs().maxCoeff(), 1e-14);
}

TEST_F(Dressing, NoSelfInducedPhase) {
    std::mt19937_64 rng(8);
    EXPECT_LT(self_induced_phase_residual(g, ff, z.u), 1e-12);
    for (int s = 0; s < 10; ++s)
        EXPECT_LT(self_induced_phase_residual(g, ff, random_smooth(g, rng, 2.0, 1.0, 0.0).u), 1e-12);
}

TEST_F(Dressing, DressedFunctionalIsPullback) {
    std::mt19937_64 rng(21);
    EXPECT_LT(dressed_identity_residual(g, ff, z), 1e-9);
    for (int s = 0; s < 10; ++s)
        EXPECT_LT(dressed_identity_residual(g, ff, random_smooth(g, rng, 1.0, 1.0, 1.0)), 1e-9);
}

TEST_F(Dressing, PairingPreserved) {
    std::mt19937_64 rng(13);
    for (int s = 0; s < 5; ++s) {
        const PhasePoint v = fixtures::random_direction(g, rng);
        const PhasePoint w = fixtures::random_direction(g, rng);
        const double coarse = pairing_defect(g, ff, z, v, w, 1e-3);
        const double fine = pairing_defect(g, ff, z, v, w, 1e-4);
        EXPECT_LT(coarse, 1e-3);
        EXPECT_LT(fine, 1e-4);
    }
}

// Needs a resolved grid: on coarse lattices the products u e^{-iA} alias and
// the conjugation error stalls at a resolution floor.
TEST(DressingFlows, ConjugateAtSecondOrder) {
    const Grid g(3, 32, 16.0);
    const auto ff = build_form_factors(g, 0.5);
    const PhasePoint z = fixtures::standard_state(g);
    std::vector<double> errs;
    for (double dt : {0.05, 0.025}) {
        EvolutionConfig cfg;
        cfg.dt = dt;
        cfg.t_final = 0.2;
        cfg.record_every = 1000;
        cfg.scheme = Scheme::strang_split;
        errs.push_back(verify_conjugation(g, ff, z, cfg).back().distance);
    }
    const double ratio = errs[0] / errs[1];
    EXPECT_GT(ratio, 3.0);
    EXPECT_LT(ratio, 5.0);
}
