#include "polaron/phase_point.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace polaron;

namespace {

// O(N^2) transform straight from the definition.
Field naive_forward(const Grid& g, const Field& u) {
    std::vector<RealField> xs;
    for (int a = 0; a < g.dim(); ++a) xs.push_back(g.x(a));
    Field out = Field::Zero(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k)
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            double phase = 0.0;
            for (int a = 0; a < g.dim(); ++a) phase += g.k(a)(k) * xs[a](i);
            out(k) += u(i) * std::exp(cplx(0.0, -phase));
        }
    return out;
}

}  // namespace

TEST(Grid, FrequencyOrder) {
    const Grid g(1, 8, two_pi);
    const std::vector<int> expect{0, 1, 2, 3, -4, -3, -2, -1};
    for (int i = 0; i < 8; ++i) {
        EXPECT_EQ(g.mode(0)(i), expect[i]);
        EXPECT_DOUBLE_EQ(g.k(0)(i), expect[i]);
        EXPECT_EQ(bool(g.nyquist_edge()(i)), expect[i] == -4);
    }
    EXPECT_DOUBLE_EQ(g.x(0)(3), 3.0 * two_pi / 8.0);
}

TEST(Grid, CellVolumes) {
    const Grid g(3, 8, 4.0);
    EXPECT_DOUBLE_EQ(g.dx(), 0.125);
    EXPECT_NEAR(g.dk(), std::pow(two_pi / 4.0, 3), 1e-14);
    EXPECT_EQ(g.size(), 512);
    EXPECT_DOUBLE_EQ(g.nyquist_radius(), std::numbers::pi * 2.0);
}

TEST(Grid, EdgeCount) {
    const Grid g(2, 6, 1.0);
    EXPECT_EQ(g.nyquist_edge().count(), 36 - 25);
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(Grid(0, 8, 1.0), std::invalid_argument);
    EXPECT_THROW(Grid(4, 8, 1.0), std::invalid_argument);
    EXPECT_THROW(Grid(1, 7, 1.0), std::invalid_argument);
    EXPECT_THROW(Grid(1, 8, 0.0), std::invalid_argument);
}

TEST(Grid, SizeMismatchThrows) {
    const Grid g(2, 8, 1.0);
    EXPECT_THROW(g.sum_forward(Field::Zero(10)), GridMismatch);
    const PhasePoint z{Field::Zero(64), Field::Zero(63)};
    EXPECT_THROW(check(g, z), GridMismatch);
}

TEST(Grid, ReflectNegatesMomentum) {
    const Grid g(3, 6, 2.0);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (g.nyquist_edge()(i)) continue;
        const auto j = g.reflect(i);
        for (int a = 0; a < 3; ++a) EXPECT_EQ(g.mode(a)(j), -g.mode(a)(i));
        EXPECT_EQ(g.reflect(j), i);
    }
}

TEST(Grid, MatchesNaiveTransform) {
    std::mt19937_64 rng(11);
    for (const auto& g : {Grid(1, 8, 3.0), Grid(2, 6, 5.0), Grid(3, 4, 2.0)}) {
        const Field u = fixtures::random_field(g, rng);
        const Field ref = naive_forward(g, u);
        EXPECT_LT((g.sum_forward(u) - ref).abs().maxCoeff(), 1e-11);
        // backward is the adjoint sum
        const Field back = g.sum_backward(ref) / double(g.size());
        EXPECT_LT((back - u).abs().maxCoeff(), 1e-12);
    }
}

TEST(Grid, PlaneWaveIsSingleMode) {
    const Grid g(2, 8, 3.0);
    const Field u = (cplx(0.0, 1.0) * (g.k(0)(2) * g.x(0) + g.k(1)(9) * g.x(1)).cast<cplx>()).exp();
    const Field c = g.sum_forward(u);
    Eigen::Index arg;
    c.abs().maxCoeff(&arg);
    EXPECT_EQ(g.mode(0)(arg), g.mode(0)(2));
    EXPECT_EQ(g.mode(1)(arg), g.mode(1)(9));
    EXPECT_NEAR(std::abs(c(arg)), double(g.size()), 1e-9);
    EXPECT_NEAR(c.abs2().sum(), double(g.size() * g.size()), 1e-6);
}

TEST(Grid, ParsevalAndRoundTrip) {
    std::mt19937_64 rng(5);
    const Grid g(3, 8, 7.0);
    for (int s = 0; s < 100; ++s) {
        const Field u = fixtures::random_field(g, rng);
        const Field c = g.forward(u);
        ASSERT_NEAR(g.norm_k(c), g.norm_x(u), 1e-12 * g.norm_x(u));
        ASSERT_LT((g.inverse(c) - u).abs().maxCoeff(), 1e-12 * u.abs().maxCoeff() * 10);
        const Field v = fixtures::random_field(g, rng);
        const cplx lhs = g.inner_x(u, v);
        const cplx rhs = g.inner_k(c, g.forward(v));
        ASSERT_LT(std::abs(lhs - rhs), 1e-11 * (1.0 + std::abs(lhs)));
    }
}

TEST(Grid, CopiesTransformIdentically) {
    const Grid a(2, 8, 1.0);
    Grid b = a;
    std::mt19937_64 rng(3);
    const Field u = fixtures::random_field(a, rng);
    EXPECT_TRUE(a.same_as(b));
    EXPECT_EQ((a.sum_forward(u) - b.sum_forward(u)).abs().maxCoeff(), 0.0);
}

TEST(PhasePoint, Arithmetic) {
    const Grid g(1, 8, two_pi);
    std::mt19937_64 rng(1);
    const PhasePoint z{fixtures::random_field(g, rng), fixtures::random_field(g, rng)};
    const PhasePoint w{fixtures::random_field(g, rng), fixtures::random_field(g, rng)};
    EXPECT_NEAR(distance(g, z + w, w), norm(g, z), 1e-12);
    EXPECT_NEAR(norm(g, cplx(0.0, 2.0) * z), 2.0 * norm(g, z), 1e-12);
    EXPECT_NEAR(symplectic_pairing(g, z, w), -symplectic_pairing(g, w, z), 1e-12);
    EXPECT_NEAR(symplectic_pairing(g, z, z), 0.0, 1e-12);
    EXPECT_NEAR(symplectic_pairing(g, z, cplx(0.0, 1.0) * z), norm(g, z) * norm(g, z), 1e-10);
    EXPECT_NEAR(norm(g, PhasePoint::zero(g)), 0.0, 0.0);
}
