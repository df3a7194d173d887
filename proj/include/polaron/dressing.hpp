// dressing.hpp - closed-form dressing flow and the identities it satisfies
#pragma once

#include "polaron/flows.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace polaron {

// Phase generator A_{alpha, iB}.
inline RealField dressing_phase(const Grid& g, const FormFactors& ff, const Field& alpha) {
    return field_A(g, alpha, Field(cplx(0.0, 1.0) * ff.generator.cast<cplx>()));
}

// The phonon increment B F(|u|^2) produces no phase: A_{B rho_k, iB} vanishes
// because B^2 is even and real. Returns its sup norm.
inline double self_induced_phase_residual(const Grid& g, const FormFactors& ff, const Field& u) {
    const Field shift = ff.generator * density_transform(g, u);
    return dressing_phase(g, ff, shift).abs().maxCoeff();
}

// D(theta): u -> u exp(-i theta A_{alpha0, iB}), alpha -> alpha0 + theta B F(|u0|^2).
inline PhasePoint dressing_apply(const Grid& g, const FormFactors& ff, const PhasePoint& z, double theta) {
    check(g, z);
    assert(self_induced_phase_residual(g, ff, z.u) < 1e-10 * (1.0 + z.u.abs2().sum() * g.dx()));
    const RealField phase = dressing_phase(g, ff, z.alpha);
    return {z.u * (cplx(0.0, -theta) * phase.cast<cplx>()).exp(),
            z.alpha + theta * ff.generator * density_transform(g, z.u)};
}

// |hhat(z) - h(D(1) z)| / (1 + |hhat(z)|)
inline double dressed_identity_residual(const Grid& g, const FormFactors& ff, const PhasePoint& z) {
    const double lhs = h_dressed(g, ff, z).total;
    const double rhs = h_undressed(g, ff, dressing_apply(g, ff, z, 1.0)).total;
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

struct ConjugationPoint {
    double t;
    double distance;
};

// Distance between phi_t(z0) and D(1) phihat_t D(-1) z0 at every record time.
// hhat = h o D(1) makes D(1) carry dressed trajectories onto undressed ones.
inline std::vector<ConjugationPoint> verify_conjugation(const Grid& g, const FormFactors& ff,
                                                        const PhasePoint& z0, const EvolutionConfig& cfg) {
    const std::int64_t steps = step_count(cfg);
    std::vector<ConjugationPoint> curve{{0.0, 0.0}};
    PhasePoint plain = z0;
    PhasePoint dressed = dressing_apply(g, ff, z0, -1.0);
    for (std::int64_t n = 1; n <= steps; ++n) {
        plain = step(g, ff, plain, cfg.dt, Flow::landau_pekar, cfg.scheme);
        dressed = dressed_step(g, ff, dressed, cfg.dt);
        if (n % cfg.record_every == 0 || n == steps) {
            const PhasePoint back = dressing_apply(g, ff, dressed, 1.0);
            curve.push_back({n * cfg.dt, distance(g, plain, back)});
        }
    }
    return curve;
}

// Change of Im<v, w> under the finite-difference pushforward of D(1) with
// step h; zero for a symplectic map up to the difference error.
inline double pairing_defect(const Grid& g, const FormFactors& ff, const PhasePoint& z,
                             const PhasePoint& v, const PhasePoint& w, double h) {
    auto push = [&](const PhasePoint& dir) {
        PhasePoint plus = dressing_apply(g, ff, z + h * dir, 1.0);
        PhasePoint minus = dressing_apply(g, ff, z - h * dir, 1.0);
        return (1.0 / (2.0 * h)) * (plus - minus);
    };
    return std::abs(symplectic_pairing(g, push(v), push(w)) - symplectic_pairing(g, v, w));
}

}  // namespace polaron
