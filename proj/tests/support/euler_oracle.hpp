#pragma once

// Independent ODE oracle for the conductance closed form: projected explicit
// Euler on dg/dt = (1-g)k_p - g k_d with rates computed here from scratch.
// Projection onto [0,1] mirrors the exact flow, which never leaves the
// interval; without it Euler blows up once theta*h > 2.

#include <algorithm>
#include <cmath>

#include "plexsim/memristor.hpp"

namespace plexsim::testing {

inline double euler_conductance(double g0, double volts, double dt, int substeps,
                                const MemristorParams& p) {
    const double v = std::abs(volts);
    const double k_p = p.k_p0 * std::exp(p.eta_p * v);
    const double k_d = p.k_d0 * std::exp(-p.eta_d * v);
    const double h = dt / substeps;
    double g = g0;
    for (int i = 0; i < substeps; ++i) {
        g += h * ((1.0 - g) * k_p - g * k_d);
        g = std::clamp(g, 0.0, 1.0);
    }
    return g;
}

}  // namespace plexsim::testing
