// form_factors.hpp - coupling profile, dressing generator and induced pair potential
#pragma once

#include "polaron/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace polaron {

inline constexpr double no_cutoff = std::numeric_limits<double>::infinity();

// Radial profiles as functions of |k|, shared by the lattice tables and the
// finite-mode Fock model.
struct CutoffProfile {
    int dim = 3;
    double ir = 1.0;
    double uv = no_cutoff;

    double power(double kabs) const { return std::pow(kabs, -0.5 * (dim - 1)); }

    double coupling(double kabs) const {
        return kabs > 0.0 && kabs <= uv ? power(kabs) : 0.0;
    }
    // Coupling restricted to the infrared ball. The boundary shell goes to the
    // generator, so generator * (1 + k^2) + coupling == coupling_ir pointwise.
    double coupling_ir(double kabs) const {
        return kabs > 0.0 && kabs < ir && kabs <= uv ? power(kabs) : 0.0;
    }
    double generator(double kabs) const {
        if (ir == uv) return 0.0;
        return kabs >= ir && kabs <= uv && kabs > 0.0 ? -power(kabs) / (1.0 + kabs * kabs) : 0.0;
    }
    // Fourier symbol of the induced pair potential.
    double pair_symbol(double kabs) const {
        const double b = generator(kabs);
        return b * b + 2.0 * b * coupling(kabs);
    }
};

struct FormFactors {
    CutoffProfile profile;
    bool ir_below_lattice = false;  // generator starts at the first lattice shell
    RealField coupling;             // f_sigma
    RealField coupling_ir;          // f restricted to |k| < sigma0
    RealField generator;            // B_sigma
    std::vector<RealField> k_generator;  // k_j B_sigma
    RealField pair_symbol;          // B^2 + 2 B f
    RealField pair_potential;       // real field on the x-lattice
};

// Frequencies that take part in the coupling: off the Nyquist edge and inside
// the ball of radius pi N / L. A finite uv cutoff restricts further.
inline Mask coupled_modes(const Grid& g) {
    return (!g.nyquist_edge()) && (g.kabs() < g.nyquist_radius());
}

inline FormFactors build_form_factors(const Grid& g, double ir, double uv = no_cutoff) {
    if (!(ir > 0.0)) throw std::invalid_argument("infrared cutoff must be positive");
    if (ir > uv) throw std::invalid_argument("infrared cutoff exceeds ultraviolet cutoff");

    FormFactors ff;
    ff.profile = {g.dim(), ir, uv};
    ff.ir_below_lattice = ir < two_pi / g.length();

    const Mask live = coupled_modes(g);
    const Eigen::Index n = g.size();
    ff.coupling = RealField::Zero(n);
    ff.coupling_ir = RealField::Zero(n);
    ff.generator = RealField::Zero(n);
    ff.pair_symbol = RealField::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!live(i)) continue;
        const double k = g.kabs()(i);
        ff.coupling(i) = ff.profile.coupling(k);
        ff.coupling_ir(i) = ff.profile.coupling_ir(k);
        ff.generator(i) = ff.profile.generator(k);
        ff.pair_symbol(i) = ff.profile.pair_symbol(k);
    }
    for (int a = 0; a < g.dim(); ++a) ff.k_generator.push_back(g.k(a) * ff.generator);

    // V(x) = Re sum_k S(k) e^{-ik.x} dk
    ff.pair_potential = g.sum_forward(ff.pair_symbol.cast<cplx>()).real() * g.dk();
    return ff;
}

}  // namespace polaron
