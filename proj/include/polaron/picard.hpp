// picard.hpp - Duhamel fixed-point map on a uniform time mesh
#pragma once

#include "polaron/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace polaron {

// States at t_n = n * step, n = 0..nodes-1.
struct TimePath {
    double step = 0.0;
    std::vector<PhasePoint> nodes;

    double horizon() const { return step * static_cast<double>(nodes.size() - 1); }
};

struct NonContraction : std::runtime_error {
    NonContraction(double r, int it)
        : std::runtime_error("Duhamel iteration is not contracting (ratio " + std::to_string(r) + ")"),
          ratio(r), iteration(it) {}
    double ratio;
    int iteration;
};

inline TimePath free_path(const Grid& g, const PhasePoint& z0, double horizon, double step_hint) {
    const auto m = std::max<long>(1, std::lround(horizon / step_hint));
    TimePath p;
    p.step = horizon / static_cast<double>(m);
    for (long n = 0; n <= m; ++n) p.nodes.push_back(free_flow(g, z0, n * p.step));
    return p;
}

// L(u, alpha)(t) = (e^{it Lap} u0 - i int_0^t e^{i(t-s) Lap} A_{alpha(s)} u(s) ds,
//                   e^{-it} alpha0 - i int_0^t e^{-i(t-s)} f F(|u(s)|^2) ds)
// with the trapezoid rule on the mesh. The propagated partial sums obey
// S_n = P S_{n-1} + g_n, so one pass costs O(nodes).
inline TimePath duhamel_map(const Grid& g, const FormFactors& ff, const TimePath& path,
                            const PhasePoint& z0) {
    check(g, z0);
    if (path.nodes.empty()) throw std::invalid_argument("empty time mesh");
    const double h = path.step;
    const double inv = 1.0 / static_cast<double>(g.size());
    const Field prop = (cplx(0.0, -h) * g.ksq().cast<cplx>()).exp();
    const cplx rot = std::exp(cplx(0.0, -h));
    const cplx mi(0.0, -1.0);

    TimePath out;
    out.step = h;
    Field free_u = g.sum_forward(z0.u);
    Field free_a = z0.alpha;
    Field sum_u, first_u, sum_a, first_a;
    for (std::size_t n = 0; n < path.nodes.size(); ++n) {
        const PhasePoint& z = path.nodes[n];
        check(g, z);
        const Field src_u = g.sum_forward(field_A(g, z.alpha, ff.coupling) * z.u);
        const Field src_a = ff.coupling * density_transform(g, z.u);
        if (n == 0) {
            sum_u = first_u = src_u;
            sum_a = first_a = src_a;
        } else {
            free_u = prop * free_u;
            free_a = rot * free_a;
            sum_u = prop * sum_u + src_u;
            first_u = prop * first_u;
            sum_a = rot * sum_a + src_a;
            first_a = rot * first_a;
        }
        const Field int_u = h * (sum_u - 0.5 * first_u - 0.5 * src_u);
        const Field int_a = h * (sum_a - 0.5 * first_a - 0.5 * src_a);
        out.nodes.push_back({g.sum_backward(free_u + mi * int_u) * inv, free_a + mi * int_a});
    }
    return out;
}

// sup over nodes of ||u - u'|| + ||alpha - alpha'||
inline double path_distance(const Grid& g, const TimePath& a, const TimePath& b) {
    if (a.nodes.size() != b.nodes.size()) throw std::invalid_argument("time mesh mismatch");
    double worst = 0.0;
    for (std::size_t n = 0; n < a.nodes.size(); ++n) {
        const double du = g.norm_x(a.nodes[n].u - b.nodes[n].u);
        const double da = g.norm_k(a.nodes[n].alpha - b.nodes[n].alpha);
        worst = std::max(worst, du + da);
    }
    return worst;
}

inline double path_sup_norm(const Grid& g, const TimePath& a) {
    double worst = 0.0;
    for (const auto& z : a.nodes) worst = std::max(worst, g.norm_x(z.u) + g.norm_k(z.alpha));
    return worst;
}

struct PicardResult {
    TimePath path;
    std::vector<double> differences;  // distance between successive iterates
    std::vector<double> ratios;       // successive difference ratios above the noise floor
    std::vector<double> iterate_norms;
    int iterations = 0;
    bool converged = false;
};

struct PicardOptions {
    double tol = 1e-12;
    int max_iterations = 60;
    double noise_floor = 1e-13;  // ratios are not formed below this difference
    int stop_after = 0;          // when positive, stop after this many iterations
};

inline PicardResult picard_solve(const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                                 double horizon, double step_hint, const PicardOptions& opt = {}) {
    PicardResult r;
    r.path = free_path(g, z0, horizon, step_hint);
    r.iterate_norms.push_back(path_sup_norm(g, r.path));
    int growing = 0;
    while (r.iterations < opt.max_iterations) {
        TimePath next = duhamel_map(g, ff, r.path, z0);
        const double diff = path_distance(g, next, r.path);
        r.path = std::move(next);
        ++r.iterations;
        r.iterate_norms.push_back(path_sup_norm(g, r.path));
        if (!r.differences.empty() && r.differences.back() > opt.noise_floor) {
            const double ratio = diff / r.differences.back();
            r.ratios.push_back(ratio);
            growing = ratio >= 1.0 ? growing + 1 : 0;
            if (growing >= 3) throw NonContraction(ratio, r.iterations);
        }
        r.differences.push_back(diff);
        if (diff <= opt.tol) {
            r.converged = true;
            break;
        }
        if (opt.stop_after > 0 && r.iterations >= opt.stop_after) break;
    }
    return r;
}

// Largest ratio among the first few successive differences.
inline double contraction_ratio(const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                                double horizon, double step_hint, int probe = 3) {
    PicardOptions opt;
    opt.stop_after = probe + 1;
    opt.tol = 0.0;
    PicardResult r;
    try {
        r = picard_solve(g, ff, z0, horizon, step_hint, opt);
    } catch (const NonContraction& e) {
        return e.ratio;
    }
    double worst = 0.0;
    for (double x : r.ratios) worst = std::max(worst, x);
    return worst;
}

// Largest horizon in (0, max_horizon] whose probe ratio stays at or below
// target, by bisection.
inline double contracting_horizon(const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                                  double max_horizon, double step_hint, double target = 0.5,
                                  int rounds = 10) {
    if (contraction_ratio(g, ff, z0, max_horizon, step_hint) <= target) return max_horizon;
    double lo = 0.0, hi = max_horizon;
    for (int i = 0; i < rounds; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (contraction_ratio(g, ff, z0, mid, step_hint) <= target) lo = mid;
        else hi = mid;
    }
    return lo;
}

}  // namespace polaron
