#pragma once

#include <cstdint>

namespace plexsim {

/// Potentiation/depression device parameters. Defaults are the nanowire-fit
/// values the simulator ships with; all of them are config-overridable.
struct MemristorParams {
    double k_p0 = 2.56e-6;   // potentiation fitting constant, 1/s
    double k_d0 = 64.90;     // depression fitting constant, 1/s
    double eta_p = 34.90;    // potentiation transition rate, 1/V
    double eta_d = 5.59;     // depression transition rate, 1/V
    double g_min = 1e-12;    // minimum conductance, S
    double g_max = 200e-12;  // maximum conductance, S

    /// Throws std::invalid_argument on a parameter outside its legal range.
    void validate() const;
};

struct RateCoefficients {
    double k_p;  // 1/s
    double k_d;  // 1/s
};

/// k_p = k_p0*exp(+eta_p*|V|), k_d = k_d0*exp(-eta_d*|V|). Depends on the
/// absolute voltage only. Throws std::invalid_argument for non-finite V.
RateCoefficients rate_coefficients(double volts, const MemristorParams& p);

/// Voltage-dependent attractor g~ = k_p/(k_p+k_d), the state every edge
/// relaxes toward under a constant applied voltage. Strictly increasing in
/// |V| and independent of the current state.
double steady_state(double volts, const MemristorParams& p);

/// Closed-form update over one step dt under constant voltage:
/// g' = g~*(1-e^(-theta*dt)) + g*e^(-theta*dt) with theta = k_p+k_d.
/// The result is a convex combination, so it stays in [0,1] and lies between
/// g and g~. Throws std::domain_error for g outside [0,1] and
/// std::invalid_argument for dt <= 0 or non-finite V.
double update_conductance(double g, double volts, double dt, const MemristorParams& p);

/// Ohm's-law mapping of the normalized state: G = g*G_max + (1-g)*G_min.
/// Edge current is I = G*V. Throws std::domain_error for g outside [0,1].
double effective_conductance(double g, const MemristorParams& p);

/// Per-edge dynamic state. Ohmic edges hold g = 0 permanently and conduct at
/// G_min for any history.
struct EdgeState {
    double g = 0.0;
    bool ohmic = false;
};

/// Device-model boundary: one conductance update plus the state-to-siemens
/// map. Lets alternative compact models slot into the engine unchanged.
class DeviceModel {
public:
    virtual ~DeviceModel() = default;
    [[nodiscard]] virtual double update(double g, double volts, double dt) const = 0;
    [[nodiscard]] virtual double conductance(double g) const = 0;
};

/// The exponential rate-balance model above.
class ExponentialRateModel final : public DeviceModel {
public:
    explicit ExponentialRateModel(const MemristorParams& params) : params_(params) {
        params_.validate();
    }

    [[nodiscard]] double update(double g, double volts, double dt) const override {
        return update_conductance(g, volts, dt, params_);
    }

    [[nodiscard]] double conductance(double g) const override {
        return effective_conductance(g, params_);
    }

    [[nodiscard]] const MemristorParams& params() const { return params_; }

private:
    MemristorParams params_;
};

/// Advances one edge; Ohmic edges are left untouched.
inline void step_edge(EdgeState& edge, double volts, double dt, const DeviceModel& model) {
    if (edge.ohmic) return;
    edge.g = model.update(edge.g, volts, dt);
}

}  // namespace plexsim
