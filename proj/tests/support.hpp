// Shared fixtures for the unit and acceptance tests.
#pragma once

#include "polaron/initial_data.hpp"
#include "polaron/form_factors.hpp"

#include <random>

namespace polaron::fixtures {

// Packet with momentum near the box center plus a phonon cloud off the origin.
inline PhasePoint standard_state(const Grid& g, double mass = 0.25) {
    const double c = 0.5 * g.length();
    PhasePoint z;
    z.u = with_mass(g, gaussian_packet(g, {c, c, c}, 1.5, {0.5, 0.0, 0.0}, 1.0), mass);
    z.alpha = phonon_gaussian(g, {0.3, 0.2, 0.0}, 1.0, 0.5);
    return z;
}

// The state used for the direct-sum reference values in tests/oracles.
inline PhasePoint oracle_state(const Grid& g) {
    const double c = 0.5 * g.length();
    PhasePoint z;
    z.u = gaussian_packet(g, {c, c, c}, 1.3, {0.7, 0.0, 0.0}, 0.4);
    z.alpha = phonon_gaussian(g, {0.3, -0.2, 0.0}, 1.0, 0.6);
    return z;
}

inline Field random_field(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Field f(g.size());
    for (auto& v : f) {
        const double re = normal(rng);
        const double im = normal(rng);
        v = {re, im};
    }
    return f;
}

inline PhasePoint random_direction(const Grid& g, std::mt19937_64& rng) {
    return random_smooth(g, rng, 2.0, 1.0, 1.0);
}

}  // namespace polaron::fixtures
