#pragma once

#include <cstdint>
#include <vector>

#include "plexsim/graph.hpp"
#include "plexsim/mna.hpp"

namespace plexsim {

/// LIF membrane and bipolar-pulse parameters. The membrane increment uses
/// C_m/dt as the single configured quantity, so the per-step voltage added by
/// an inflow I is I / cm_over_dt.
///
/// The default cm_over_dt is calibrated so a pulsing neuron ignites a
/// neighbor across a pristine plexus within a handful of steps (the direct
/// electrode-to-electrode edge potentiates in-step at 1.2 V, so latency is
/// 1-2 steps at separation 1-2 and a few steps at separation 3), which is
/// what lets a single corner pulse start self-sustained network activity.
/// The device-sheet value of 3.5e-20 F/s stays available behind the
/// use_datasheet_cm_over_dt config flag but produces per-step increments of
/// ~1e9 V, far above any threshold.
struct NeuronParams {
    double tau_m = 1e-3;        // membrane time constant, s
    double cm_over_dt = 8e-12;  // F/s
    double v_th = 0.5;          // spike threshold, V
    double t_p = 0.5e-3;        // positive pulse width, s
    double t_n = 0.3e-3;        // negative pulse width (refractory), s
    double a_p = 1.2;           // positive pulse amplitude, V
    double a_n = -0.1;          // negative pulse amplitude, V

    void validate() const;
};

enum class NeuronPhase : std::uint8_t {
    integrating,
    pulsing_positive,
    pulsing_negative,
};

struct NeuronState {
    double v_m = 0.0;             // membrane potential, V; 0 while pulsing
    NeuronPhase phase = NeuronPhase::integrating;
    double phase_time_left = 0.0; // s, meaningful only while pulsing
    NodeIndex in_node = -1;       // current-sinking electrode (virtual ground)
    NodeIndex out_node = -1;      // pulse-applying electrode
    std::vector<double> spike_times;  // s
};

/// One membrane update: V <- V*e^(-dt/tau) + I/(C_m/dt), then threshold
/// check. Crossing v_th records a spike at `now_s` (end of the step), resets
/// the membrane and primes the positive pulse, which first reaches the
/// plexus at the next step's solve. Returns whether a spike fired. No-op in
/// the pulsing phases (inflow is measured but discarded there).
/// Throws std::domain_error for non-finite current.
bool step_membrane(NeuronState& state, double i_ext_amps, double dt, double now_s,
                   const NeuronParams& p);

/// Advances the pulse clock by dt. The positive phase expires into
/// pulsing_negative(t_n); the negative (refractory) phase expires back into
/// integrating with the membrane at 0. Throws std::logic_error if the neuron
/// is integrating.
void advance_pulse(NeuronState& state, double dt, const NeuronParams& p);

/// Appends this neuron's constraints for the next solve: the in-electrode is
/// always a 0 V virtual ground; the out-electrode applies a_p or a_n while
/// pulsing and floats (no constraint) while integrating. source_id is
/// 2*neuron_id for the in-electrode and 2*neuron_id+1 for the out-electrode.
void electrode_constraints(const NeuronState& state, const NeuronParams& p,
                           int neuron_id, std::vector<VoltageConstraint>& out);

/// Out-electrode voltage the neuron applies this step (0 while integrating).
[[nodiscard]] double applied_voltage(const NeuronState& state, const NeuronParams& p);

}  // namespace plexsim
