// diagnostics.hpp - conserved quantities, norms, drift and convergence order
#pragma once

#include "polaron/hamiltonians.hpp"
#include "polaron/strichartz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace polaron {

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;  // ||u||^2
    EnergyBreakdown energy;
    EnergyBreakdown dressed_energy;
    double h1_norm = 0.0;
    double max_abs_u = 0.0;
    std::array<double, 3> lq{};  // ||u||_q for the admissible pairs, zero when d < 3
};

inline DiagnosticsRow diagnostics_row(const Grid& g, const FormFactors& ff, double t,
                                      const PhasePoint& z) {
    DiagnosticsRow r;
    r.t = t;
    r.mass = z.u.abs2().sum() * g.dx();
    r.energy = h_undressed(g, ff, z);
    r.dressed_energy = h_dressed(g, ff, z);
    r.h1_norm = std::sqrt(r.mass + r.energy.kinetic);
    r.max_abs_u = z.u.size() ? z.u.abs().maxCoeff() : 0.0;
    if (const auto pairs = strichartz_pairs(g.dim()))
        for (int j = 0; j < 3; ++j) r.lq[j] = lq_norm(g, z.u, (*pairs)[j].q);
    return r;
}

// max_t |v(t) - v(0)| / (1 + |v(0)|)
inline double relative_drift(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - v.front()));
    return worst / (1.0 + std::abs(v.front()));
}

struct OrderEstimate {
    std::vector<double> ratios;
    std::vector<double> orders;  // log2 of successive ratios
    bool monotone = true;

    double last() const { return orders.empty() ? 0.0 : orders.back(); }
    double mean() const {
        double s = 0.0;
        for (double o : orders) s += o;
        return orders.empty() ? 0.0 : s / static_cast<double>(orders.size());
    }
};

// Errors measured at dt, dt/2, dt/4, ...
inline OrderEstimate convergence_order(const std::vector<double>& errors) {
    OrderEstimate e;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double r = errors[i - 1] / errors[i];
        e.ratios.push_back(r);
        e.orders.push_back(std::log2(r));
        if (!(errors[i] < errors[i - 1])) e.monotone = false;
    }
    return e;
}

}  // namespace polaron
