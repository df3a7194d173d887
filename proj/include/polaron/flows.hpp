// flows.hpp - free, Landau-Pekar and dressed time integrators
#pragma once

#include "polaron/diagnostics.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polaron {

enum class Flow { free, landau_pekar, dressed };
enum class Scheme { strang_split, rk4_gradient };

struct EvolutionConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    Scheme scheme = Scheme::strang_split;
    int record_every = 1;
    bool keep_states = false;
};

struct BlowUp : std::runtime_error {
    BlowUp(std::int64_t step_, double t_, const std::string& what)
        : std::runtime_error(what), step(step_), t(t_) {}
    std::int64_t step;
    double t;
};

struct Sample {
    double t = 0.0;
    DiagnosticsRow row;
    std::optional<PhasePoint> state;
};

struct Trajectory {
    std::vector<Sample> samples;
    PhasePoint last;

    std::vector<double> column(auto&& get) const {
        std::vector<double> out;
        for (const auto& s : samples) out.push_back(get(s.row));
        return out;
    }
};

// phi0_t (u, alpha) = (e^{it Laplacian} u, e^{-it} alpha)
inline PhasePoint free_flow(const Grid& g, const PhasePoint& z, double t) {
    check(g, z);
    const Field phase = (cplx(0.0, -t) * g.ksq().cast<cplx>()).exp();
    return {g.sum_backward(phase * g.sum_forward(z.u)) / static_cast<double>(g.size()),
            z.alpha * std::exp(cplx(0.0, -t))};
}

inline PhasePoint apply_gradient_as_velocity(const GradientPair& grad) {
    return {cplx(0.0, -1.0) * grad.u, cplx(0.0, -1.0) * grad.alpha};
}

// Exact flow of the coupling and phonon parts of the Landau-Pekar field with
// kinetic energy switched off. |u| is frozen, the phonon equation is then
// linear with a constant source and u picks up the time-integrated potential.
inline PhasePoint lp_interaction_flow(const Grid& g, const FormFactors& ff, const PhasePoint& z,
                                      double dt) {
    const Field source = ff.coupling * density_transform(g, z.u);
    const cplx rot = std::exp(cplx(0.0, -dt));
    const cplx mean = (1.0 - rot) / cplx(0.0, 1.0);  // int_0^dt e^{-is} ds
    const Field alpha_mean = mean * z.alpha + (mean - dt) * source;
    const RealField pot = field_A(g, alpha_mean, ff.coupling);
    return {z.u * (cplx(0.0, -1.0) * pot.cast<cplx>()).exp(), rot * z.alpha + (rot - 1.0) * source};
}

inline PhasePoint kinetic_flow(const Grid& g, const PhasePoint& z, double t) {
    const Field phase = (cplx(0.0, -t) * g.ksq().cast<cplx>()).exp();
    return {g.sum_backward(phase * g.sum_forward(z.u)) / static_cast<double>(g.size()), z.alpha};
}

inline PhasePoint lp_step(const Grid& g, const FormFactors& ff, const PhasePoint& z, double dt) {
    PhasePoint w = kinetic_flow(g, z, 0.5 * dt);
    w = lp_interaction_flow(g, ff, w, dt);
    return kinetic_flow(g, w, 0.5 * dt);
}

// Classical fourth-order Runge-Kutta step for z' = rhs(z).
template <class Rhs>
PhasePoint rk4(const PhasePoint& z, double dt, Rhs&& rhs) {
    const PhasePoint k1 = rhs(z);
    const PhasePoint k2 = rhs(z + (0.5 * dt) * k1);
    const PhasePoint k3 = rhs(z + (0.5 * dt) * k2);
    const PhasePoint k4 = rhs(z + dt * k3);
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Half free flow, RK4 on the interaction gradient, half free flow.
template <class Gradient>
PhasePoint split_rk4_step(const Grid& g, const PhasePoint& z, double dt, Gradient&& grad) {
    PhasePoint w = free_flow(g, z, 0.5 * dt);
    w = rk4(w, dt, [&](const PhasePoint& v) { return apply_gradient_as_velocity(grad(v)); });
    return free_flow(g, w, 0.5 * dt);
}

inline PhasePoint dressed_step(const Grid& g, const FormFactors& ff, const PhasePoint& z, double dt) {
    return split_rk4_step(g, z, dt, [&](const PhasePoint& v) {
        return grad_dressed(g, ff, v, term::dressed & ~term::free);
    });
}

inline PhasePoint lp_rk4_step(const Grid& g, const FormFactors& ff, const PhasePoint& z, double dt) {
    return split_rk4_step(g, z, dt, [&](const PhasePoint& v) {
        return grad_undressed(g, ff, v, term::coupling);
    });
}

inline PhasePoint step(const Grid& g, const FormFactors& ff, const PhasePoint& z, double dt,
                       Flow flow, Scheme scheme) {
    switch (flow) {
        case Flow::free: return free_flow(g, z, dt);
        case Flow::landau_pekar:
            return scheme == Scheme::strang_split ? lp_step(g, ff, z, dt) : lp_rk4_step(g, ff, z, dt);
        case Flow::dressed:
            if (scheme == Scheme::strang_split)
                throw std::invalid_argument("dressed flow has no exact interaction substep; use rk4");
            return dressed_step(g, ff, z, dt);
    }
    return z;
}

// X(t, w) = -i phi0_{-t} grad h_I (phi0_t w) for the dressed interaction.
inline PhasePoint interaction_field(const Grid& g, const FormFactors& ff, double t, const PhasePoint& w) {
    const GradientPair grad = grad_dressed(g, ff, free_flow(g, w, t), term::dressed & ~term::free);
    return free_flow(g, apply_gradient_as_velocity(grad), -t);
}

// Integrates w' = X(t, w) with RK4 and maps back by phi0_T.
inline PhasePoint evolve_interaction_picture(const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                                             double t_final, double dt) {
    const auto steps = static_cast<std::int64_t>(std::llround(t_final / dt));
    PhasePoint w = z0;
    for (std::int64_t n = 0; n < steps; ++n) {
        const double t = n * dt;
        const PhasePoint k1 = interaction_field(g, ff, t, w);
        const PhasePoint k2 = interaction_field(g, ff, t + 0.5 * dt, w + (0.5 * dt) * k1);
        const PhasePoint k3 = interaction_field(g, ff, t + 0.5 * dt, w + (0.5 * dt) * k2);
        const PhasePoint k4 = interaction_field(g, ff, t + dt, w + dt * k3);
        w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return free_flow(g, w, steps * dt);
}

inline std::int64_t step_count(const EvolutionConfig& cfg) {
    if (!(cfg.dt != 0.0) || cfg.t_final < 0.0 || cfg.record_every < 1)
        throw std::invalid_argument("evolution needs dt != 0, t_final >= 0, record_every >= 1");
    const double n = cfg.t_final / std::abs(cfg.dt);
    const auto steps = static_cast<std::int64_t>(std::llround(n));
    if (std::abs(n - steps) > 1e-9 * std::max(1.0, n))
        throw std::invalid_argument("t_final is not a whole number of steps");
    return steps;
}

inline Trajectory evolve(const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                         const EvolutionConfig& cfg, Flow flow) {
    check(g, z0);
    const std::int64_t steps = step_count(cfg);
    Trajectory tr;
    auto record = [&](double t, const PhasePoint& z) {
        Sample s{t, diagnostics_row(g, ff, t, z), std::nullopt};
        if (cfg.keep_states) s.state = z;
        tr.samples.push_back(std::move(s));
    };
    const double limit = 1e6 * std::max(z0.u.size() ? z0.u.abs().maxCoeff() : 0.0, 1e-300);
    PhasePoint z = z0;
    record(0.0, z);
    for (std::int64_t n = 1; n <= steps; ++n) {
        z = step(g, ff, z, cfg.dt, flow, cfg.scheme);
        const double t = n * cfg.dt;
        if (!z.finite() || (z.u.size() && z.u.abs().maxCoeff() > limit))
            throw BlowUp(n, t, "field blew up at step " + std::to_string(n));
        if (n % cfg.record_every == 0 || n == steps) record(t, z);
    }
    tr.last = std::move(z);
    return tr;
}

inline Trajectory lp_evolve(const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                            const EvolutionConfig& cfg) {
    return evolve(g, ff, z0, cfg, Flow::landau_pekar);
}

inline Trajectory dressed_evolve(const Grid& g, const FormFactors& ff, const PhasePoint& z0,
                                 EvolutionConfig cfg) {
    cfg.scheme = Scheme::rk4_gradient;
    return evolve(g, ff, z0, cfg, Flow::dressed);
}

// Final state only, no diagnostics.
inline PhasePoint propagate(const Grid& g, const FormFactors& ff, const PhasePoint& z0, double dt,
                            std::int64_t steps, Flow flow, Scheme scheme) {
    PhasePoint z = z0;
    for (std::int64_t n = 0; n < steps; ++n) z = step(g, ff, z, dt, flow, scheme);
    return z;
}

}  // namespace polaron
