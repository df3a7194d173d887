#include "polaron/picard.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace polaron;

namespace {

struct Picard : ::testing::Test {
    Grid g{3, 8, 8.0};
    FormFactors ff = build_form_factors(g, 0.5);
    PhasePoint z0 = fixtures::standard_state(g);
};

}  // namespace

TEST_F(Picard, FreePathSolvesUncoupledProblem) {
    const TimePath p = free_path(g, z0, 0.2, 0.01);
    EXPECT_EQ(p.nodes.size(), 21u);
    EXPECT_NEAR(p.horizon(), 0.2, 1e-15);
    EXPECT_LT(distance(g, p.nodes.back(), free_flow(g, z0, 0.2)), 1e-13);
}

TEST_F(Picard, ZeroElectronIsFixedPoint) {
    PhasePoint z = z0;
    z.u.setZero();
    const TimePath p = free_path(g, z, 0.3, 0.01);
    EXPECT_LT(path_distance(g, duhamel_map(g, ff, p, z), p), 1e-14);
}

TEST_F(Picard, FixedPointIsTrajectory) {
    const auto r = picard_solve(g, ff, z0, 0.2, 1e-3);
    ASSERT_TRUE(r.converged);
    const long steps = static_cast<long>(r.path.nodes.size()) - 1;
    const PhasePoint strang = propagate(g, ff, z0, r.path.step, steps, Flow::landau_pekar, Scheme::strang_split);
    EXPECT_LT(distance(g, strang, r.path.nodes.back()), 1e-6);
    for (double q : r.ratios) EXPECT_LT(q, 0.5);
}

TEST_F(Picard, TrapezoidIsSecondOrder) {
    std::vector<double> errs;
    const PhasePoint ref = propagate(g, ff, z0, 1e-3, 200, Flow::landau_pekar, Scheme::strang_split);
    for (double h : {0.02, 0.01}) errs.push_back(distance(g, picard_solve(g, ff, z0, 0.2, h).path.nodes.back(), ref));
    EXPECT_GT(errs[0] / errs[1], 3.0);
    EXPECT_LT(errs[0] / errs[1], 5.0);
}

TEST_F(Picard, RatioGrowsWithHorizon) {
    const double small = contraction_ratio(g, ff, z0, 0.1, 1e-2);
    const double large = contraction_ratio(g, ff, z0, 1.0, 1e-2);
    EXPECT_LT(small, large);
    const double t = contracting_horizon(g, ff, z0, 1.0, 1e-2);
    EXPECT_GT(t, 0.0);
    EXPECT_LE(contraction_ratio(g, ff, z0, t, 1e-2), 0.5);
}

TEST_F(Picard, StrongCouplingDoesNotContract) {
    const PhasePoint big = cplx(40.0) * z0;
    EXPECT_THROW(picard_solve(g, ff, big, 3.0, 1e-2), NonContraction);
}

TEST_F(Picard, MeshMismatchRejected) {
    const TimePath a = free_path(g, z0, 0.1, 0.01);
    const TimePath b = free_path(g, z0, 0.2, 0.01);
    EXPECT_THROW(path_distance(g, a, b), std::invalid_argument);
}
