// strichartz.hpp - discrete mixed space-time norms for admissible exponent pairs
#pragma once

#include "polaron/grid.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace polaron {

struct ExponentPair {
    double p;  // time exponent
    double q;  // space exponent
};

// Pairs with 2/p + d/q = d/2 used by the well-posedness argument; only
// meaningful for d >= 3.
inline std::optional<std::array<ExponentPair, 3>> strichartz_pairs(int d) {
    if (d < 3) return std::nullopt;
    return std::array<ExponentPair, 3>{{{2.0, 2.0 * d / (d - 2.0)},
                                         {4.0, 2.0 * d / (d - 1.0)},
                                         {8.0, 4.0 * d / (2.0 * d - 1.0)}}};
}

inline double lq_norm(const Grid& g, const Field& u, double q) {
    return std::pow((u.abs().pow(q)).sum() * g.dx(), 1.0 / q);
}

// ||u||_{L^{4d/(2d-1)}} <= ||u||_{L^2}^{3/4} ||u||_{L^{2d/(d-2)}}^{1/4} by Hoelder;
// returns right side minus left side.
inline std::optional<double> interpolation_residual(const Grid& g, const Field& u) {
    const auto pairs = strichartz_pairs(g.dim());
    if (!pairs) return std::nullopt;
    const double lhs = lq_norm(g, u, (*pairs)[2].q);
    const double rhs = std::pow(lq_norm(g, u, 2.0), 0.75) * std::pow(lq_norm(g, u, (*pairs)[0].q), 0.25);
    return rhs - lhs;
}

struct StrichartzReport {
    std::array<ExponentPair, 3> pairs{};
    std::array<double, 3> norms{};  // ||u||_{L^p_t L^q_x} over the sampled window
    double sup_l2 = 0.0;
    // ||u||_{L^8 L^q3} <= sup ||u||_2^{3/4} ||u||_{L^2 L^q1}^{1/4}, right minus left
    double interpolation_residual = 0.0;
};

// times: sample instants; space_norms[i][j]: ||u(t_i)||_{q_j}; l2[i]: ||u(t_i)||_2.
// Time integrals use the trapezoid rule.
inline std::optional<StrichartzReport> strichartz_report(int dim, const std::vector<double>& times,
                                                         const std::vector<std::array<double, 3>>& space_norms,
                                                         const std::vector<double>& l2) {
    const auto pairs = strichartz_pairs(dim);
    if (!pairs) return std::nullopt;
    StrichartzReport r;
    r.pairs = *pairs;
    for (double v : l2) r.sup_l2 = std::max(r.sup_l2, v);
    for (int j = 0; j < 3; ++j) {
        const double p = r.pairs[j].p;
        double s = 0.0;
        for (std::size_t i = 1; i < times.size(); ++i)
            s += 0.5 * (times[i] - times[i - 1]) *
                 (std::pow(space_norms[i][j], p) + std::pow(space_norms[i - 1][j], p));
        r.norms[j] = std::pow(s, 1.0 / p);
    }
    r.interpolation_residual = std::pow(r.sup_l2, 0.75) * std::pow(r.norms[0], 0.25) - r.norms[2];
    return r;
}

}  // namespace polaron
