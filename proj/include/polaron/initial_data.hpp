// initial_data.hpp - parameterized initial fields and a seeded smooth random generator
#pragma once

#include "polaron/phase_point.hpp"

#include <array>
#include <cmath>
#include <random>

namespace polaron {

using Vec3 = std::array<double, 3>;

// amplitude * exp(-|x - c|^2 / (2 w^2)) e^{i p.x}, distances taken to the
// nearest periodic image of the center.
inline Field gaussian_packet(const Grid& g, const Vec3& center, double width, const Vec3& momentum,
                             double amplitude) {
    RealField r2 = RealField::Zero(g.size());
    RealField phase = RealField::Zero(g.size());
    const double len = g.length();
    for (int a = 0; a < g.dim(); ++a) {
        RealField d = g.x(a) - center[a];
        d -= len * (d / len).round();
        r2 += d.square();
        phase += momentum[a] * g.x(a);
    }
    const RealField env = amplitude * (-0.5 * r2 / (width * width)).exp();
    return env.cast<cplx>() * (cplx(0.0, 1.0) * phase.cast<cplx>()).exp();
}

// u rescaled so that ||u||^2 = mass on the lattice; zero stays zero.
inline Field with_mass(const Grid& g, const Field& u, double mass) {
    const double now = u.abs2().sum() * g.dx();
    return now > 0.0 ? Field(u * std::sqrt(mass / now)) : u;
}

// amplitude * exp(-|k - c|^2 / (2 w^2)) on the k-lattice.
inline Field phonon_gaussian(const Grid& g, const Vec3& center, double width, double amplitude) {
    RealField r2 = RealField::Zero(g.size());
    for (int a = 0; a < g.dim(); ++a) r2 += (g.k(a) - center[a]).square();
    return (amplitude * (-0.5 * r2 / (width * width)).exp()).cast<cplx>();
}

// amplitude * exp(-(|k| - radius)^2 / (2 w^2)), a smoothed single shell.
inline Field phonon_shell(const Grid& g, double radius, double width, double amplitude) {
    return (amplitude * (-0.5 * (g.kabs() - radius).square() / (width * width)).exp()).cast<cplx>();
}

// Complex Gaussian coefficients damped by exp(-|m|^2 / (2 w^2)) in lattice
// mode units, Nyquist edge left empty, scaled to unit l2 norm (unweighted).
inline Field smooth_coefficients(const Grid& g, std::mt19937_64& rng, double width) {
    std::normal_distribution<double> normal;
    Field c(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        double m2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) m2 += double(g.mode(a)(i)) * g.mode(a)(i);
        const double damp = g.nyquist_edge()(i) ? 0.0 : std::exp(-0.5 * m2 / (width * width));
        const double re = normal(rng);
        const double im = normal(rng);
        c(i) = damp * cplx(re, im);
    }
    return c / std::sqrt(c.abs2().sum());
}

// Electron field with smooth random spectrum and ||u||_{L2} = norm_u; phonon
// field with smooth random profile and ||alpha||_{L2} = norm_alpha.
inline PhasePoint random_smooth(const Grid& g, std::mt19937_64& rng, double width, double norm_u,
                                double norm_alpha) {
    PhasePoint z;
    const Field cu = smooth_coefficients(g, rng, width);
    z.u = g.inverse(cu) * (norm_u / std::sqrt(cu.abs2().sum() * g.dk()));
    const Field ca = smooth_coefficients(g, rng, width);
    z.alpha = ca * (norm_alpha / std::sqrt(g.dk()));
    return z;
}

}  // namespace polaron
