#include "plexsim/memristor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plexsim {

void MemristorParams::validate() const {
    if (!(k_p0 > 0.0)) throw std::invalid_argument("k_p0 must be positive");
    if (!(k_d0 > 0.0)) throw std::invalid_argument("k_d0 must be positive");
    if (!(eta_p > 0.0)) throw std::invalid_argument("eta_p must be positive");
    if (!(eta_d > 0.0)) throw std::invalid_argument("eta_d must be positive");
    if (!(g_min > 0.0) || !(g_max > g_min)) {
        throw std::invalid_argument("conductance bounds require 0 < G_min < G_max");
    }
}

namespace {

void require_finite_voltage(double volts) {
    if (!std::isfinite(volts)) {
        throw std::invalid_argument("edge voltage must be finite");
    }
}

}  // namespace

RateCoefficients rate_coefficients(double volts, const MemristorParams& p) {
    require_finite_voltage(volts);
    const double v = std::abs(volts);
    return {p.k_p0 * std::exp(p.eta_p * v), p.k_d0 * std::exp(-p.eta_d * v)};
}

double steady_state(double volts, const MemristorParams& p) {
    require_finite_voltage(volts);
    // k_p/(k_p+k_d) written as 1/(1 + (k_d0/k_p0) e^{-(eta_p+eta_d)|V|}) so
    // large |V| cannot overflow the numerator.
    const double v = std::abs(volts);
    return 1.0 / (1.0 + (p.k_d0 / p.k_p0) * std::exp(-(p.eta_p + p.eta_d) * v));
}

double update_conductance(double g, double volts, double dt, const MemristorParams& p) {
    if (!(g >= 0.0 && g <= 1.0)) {
        throw std::domain_error("normalized conductance outside [0,1]");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    const auto [k_p, k_d] = rate_coefficients(volts, p);
    const double g_inf = steady_state(volts, p);
    const double decay = std::exp(-(k_p + k_d) * dt);
    // Convex combination of g and the attractor; clamp only to shed the last
    // ulp of rounding.
    return std::clamp(g_inf + (g - g_inf) * decay, 0.0, 1.0);
}

double effective_conductance(double g, const MemristorParams& p) {
    if (!(g >= 0.0 && g <= 1.0)) {
        throw std::domain_error("normalized conductance outside [0,1]");
    }
    return g * p.g_max + (1.0 - g) * p.g_min;
}

}  // namespace plexsim
