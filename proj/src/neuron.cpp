#include "plexsim/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plexsim {

void NeuronParams::validate() const {
    if (!(tau_m > 0.0)) throw std::invalid_argument("tau_m must be positive");
    if (!(cm_over_dt > 0.0)) throw std::invalid_argument("cm_over_dt must be positive");
    if (!(v_th > 0.0)) throw std::invalid_argument("v_th must be positive");
    if (!(t_p > 0.0)) throw std::invalid_argument("t_p must be positive");
    if (!(t_n >= 0.0)) throw std::invalid_argument("t_n must be non-negative");
    if (!(a_p > 0.0)) throw std::invalid_argument("a_p must be positive");
    if (!(a_n <= 0.0)) throw std::invalid_argument("a_n must be non-positive");
}

bool step_membrane(NeuronState& state, double i_ext_amps, double dt, double now_s,
                   const NeuronParams& p) {
    if (state.phase != NeuronPhase::integrating) return false;
    if (!std::isfinite(i_ext_amps)) {
        throw std::domain_error("in-electrode current must be finite");
    }
    double v = state.v_m * std::exp(-dt / p.tau_m) + i_ext_amps / p.cm_over_dt;
    v = std::max(v, 0.0);  // membrane floor; outflow cannot drive V_m below rest
    if (v >= p.v_th) {
        state.spike_times.push_back(now_s);
        state.v_m = 0.0;
        state.phase = NeuronPhase::pulsing_positive;
        state.phase_time_left = p.t_p;
        return true;
    }
    state.v_m = v;
    return false;
}

void advance_pulse(NeuronState& state, double dt, const NeuronParams& p) {
    if (state.phase == NeuronPhase::integrating) {
        throw std::logic_error("advance_pulse called on an integrating neuron");
    }
    state.phase_time_left -= dt;
    // Expire once the remaining width is under half a step.
    if (state.phase_time_left > 0.5 * dt) return;
    if (state.phase == NeuronPhase::pulsing_positive && p.t_n > 0.5 * dt) {
        state.phase = NeuronPhase::pulsing_negative;
        state.phase_time_left = p.t_n;
    } else {
        state.phase = NeuronPhase::integrating;
        state.phase_time_left = 0.0;
        state.v_m = 0.0;
    }
}

void electrode_constraints(const NeuronState& state, const NeuronParams& p,
                           int neuron_id, std::vector<VoltageConstraint>& out) {
    out.push_back({state.in_node, 0.0, 2 * neuron_id});
    if (state.phase == NeuronPhase::pulsing_positive) {
        out.push_back({state.out_node, p.a_p, 2 * neuron_id + 1});
    } else if (state.phase == NeuronPhase::pulsing_negative) {
        out.push_back({state.out_node, p.a_n, 2 * neuron_id + 1});
    }
}

double applied_voltage(const NeuronState& state, const NeuronParams& p) {
    switch (state.phase) {
        case NeuronPhase::pulsing_positive: return p.a_p;
        case NeuronPhase::pulsing_negative: return p.a_n;
        case NeuronPhase::integrating: break;
    }
    return 0.0;
}

}  // namespace plexsim
