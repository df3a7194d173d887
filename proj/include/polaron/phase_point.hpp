// phase_point.hpp - classical state (electron field, phonon field)
#pragma once

#include "polaron/grid.hpp"

#include <cmath>

namespace polaron {

// u lives on the x-lattice, alpha on the k-lattice of the same grid.
struct PhasePoint {
    Field u;
    Field alpha;

    static PhasePoint zero(const Grid& g) {
        return {Field::Zero(g.size()), Field::Zero(g.size())};
    }

    PhasePoint& operator+=(const PhasePoint& o) {
        u += o.u;
        alpha += o.alpha;
        return *this;
    }
    PhasePoint& operator-=(const PhasePoint& o) {
        u -= o.u;
        alpha -= o.alpha;
        return *this;
    }
    PhasePoint& operator*=(cplx s) {
        u *= s;
        alpha *= s;
        return *this;
    }
    friend PhasePoint operator+(PhasePoint a, const PhasePoint& b) { return a += b; }
    friend PhasePoint operator-(PhasePoint a, const PhasePoint& b) { return a -= b; }
    friend PhasePoint operator*(cplx s, PhasePoint a) { return a *= s; }

    bool finite() const { return u.allFinite() && alpha.allFinite(); }
};

// Hamiltonian gradient d/du-bar, d/dalpha-bar with respect to the dx and dk
// weighted pairings.
struct GradientPair {
    Field u;
    Field alpha;
};

inline void check(const Grid& g, const PhasePoint& z) {
    g.check(z.u);
    g.check(z.alpha);
}

// Norm on L2 (+) L2 with the lattice weights.
inline double distance(const Grid& g, const PhasePoint& a, const PhasePoint& b) {
    const double du = (a.u - b.u).abs2().sum() * g.dx();
    const double da = (a.alpha - b.alpha).abs2().sum() * g.dk();
    return std::sqrt(du + da);
}

inline double norm(const Grid& g, const PhasePoint& z) {
    return std::sqrt(z.u.abs2().sum() * g.dx() + z.alpha.abs2().sum() * g.dk());
}

// Real part of the weighted inner product; 2 Re <grad, v> is the directional
// derivative of a functional whose Wirtinger gradient is grad.
inline double real_pairing(const Grid& g, const GradientPair& grad, const PhasePoint& v) {
    return 2.0 * (g.inner_x(grad.u, v.u).real() + g.inner_k(grad.alpha, v.alpha).real());
}

// Symplectic form Im <v, w> on the phase space.
inline double symplectic_pairing(const Grid& g, const PhasePoint& v, const PhasePoint& w) {
    return g.inner_x(v.u, w.u).imag() + g.inner_k(v.alpha, w.alpha).imag();
}

}  // namespace polaron
