#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "plexsim/graph.hpp"
#include "plexsim/image.hpp"
#include "plexsim/memristor.hpp"
#include "plexsim/mna.hpp"
#include "plexsim/neuron.hpp"
#include "plexsim/traces.hpp"

namespace plexsim {

struct GridSpec {
    int width = 41;
    int height = 41;
    double cell_size_um = 25.0;
    double diagonal_fraction = 0.0;
    double ohmic_fraction = 0.0;  // fraction of edges made non-memristive
    double g_init = 0.0;          // pristine normalized conductance
    double g_init_max = -1.0;     // if >= 0: per-edge uniform in [g_init, g_init_max]
    ExtentMode extent_mode = ExtentMode::node_pitch;
};

/// One neuron's electrode pair in grid coordinates, with optional per-neuron
/// overrides of the tunable LIF parameters.
struct NeuronPlacement {
    int in_col = 0;
    int in_row = 0;
    int out_col = 0;
    int out_row = 0;
    std::optional<double> tau_m;
    std::optional<double> v_th;
    std::optional<double> t_p;
    std::optional<double> t_n;
    std::optional<double> a_p;
    std::optional<double> a_n;
};

/// Voltage applied at one grid node over [t_start, t_stop); the node emits no
/// constraint outside that window.
struct InputSpec {
    int col = 0;
    int row = 0;
    double amplitude_v = 0.0;
    double t_start_s = 0.0;
    double t_stop_s = 0.0;
};

struct RecordOptions {
    double rate_window_s = -1.0;     // < 0: defaults to 50*dt
    int snapshot_every_steps = 100;  // 0 disables field snapshots
    bool applied_voltage = true;
};

struct SimConfig {
    GridSpec grid;
    MemristorParams memristor;
    NeuronParams lif;  // global defaults; placements may override tunables
    bool use_datasheet_cm_over_dt = false;
    std::vector<NeuronPlacement> neurons;
    int random_neuron_count = 0;
    std::optional<NodeRect> neuron_exclude;  // region kept clear of random placements
    std::vector<InputSpec> inputs;
    double dt = 1e-4;
    double t_end = 0.1;
    std::uint64_t seed = 0;
    RecordOptions record;

    /// Effective membrane constant after the datasheet-value flag is applied.
    [[nodiscard]] double effective_cm_over_dt() const;

    /// Range and consistency checks that need no graph; throws ConfigError
    /// naming the field. Collision checks happen at placement resolution.
    void validate() const;

    [[nodiscard]] std::int64_t total_steps() const;
};

/// Expands random_neuron_count into explicit placements (seeded stream,
/// uniform over the grid, in/out on horizontally adjacent nodes, avoiding
/// electrode collisions and the exclude region). Idempotent once resolved.
/// Throws ConfigError if the grid cannot host the requested count.
void resolve_placements(SimConfig& config);

/// One simulation instance. Construction builds the graph, resolves and
/// validates electrode placements, seeds edge states and records the t = 0
/// sample; each step() runs one iteration of the loop:
///   1. pulses primed by the previous membrane update become active,
///   2. solve the plexus voltages/currents under this step's constraints,
///   3. update edge conductances from the solved voltage differences,
///   4. update membranes from in-electrode currents (or advance pulse
///      clocks), priming pulses for the next step.
class Simulation {
public:
    explicit Simulation(SimConfig config);

    /// Optional streaming observer (CSV writer); records still accumulate in
    /// the in-memory TraceStore either way.
    void attach_sink(TraceSink* sink) { sink_ = sink; }

    void step();
    void run_all();

    [[nodiscard]] const TraceStore& traces() const { return traces_; }
    [[nodiscard]] const SimConfig& config() const { return config_; }
    [[nodiscard]] const PlexusGraph& graph() const { return graph_; }
    [[nodiscard]] const std::vector<EdgeState>& edge_states() const { return edges_; }
    [[nodiscard]] const std::vector<NeuronState>& neurons() const { return neurons_; }
    [[nodiscard]] const std::vector<NeuronParams>& neuron_params() const { return neuron_params_; }
    [[nodiscard]] const std::vector<NodeIndex>& input_nodes() const { return input_nodes_; }
    [[nodiscard]] const MnaSolution& last_solution() const { return solution_; }
    [[nodiscard]] std::int64_t step_index() const { return step_; }
    [[nodiscard]] double time_now() const { return static_cast<double>(step_) * config_.dt; }

    /// Assembles the system the next step would solve; used by the debug
    /// matrix dump.
    [[nodiscard]] MnaSystem assemble_next_system() const;

    /// Bit-exact binary snapshot of the dynamic state (step index, edge
    /// conductances, neuron states). Topology and schedules are rebuilt from
    /// the config, so save/load across identical configs resumes exactly.
    void save_state(std::ostream& out) const;
    void load_state(std::istream& in);

private:
    void gather_constraints(double t_now, std::vector<VoltageConstraint>& out) const;
    void record_sample(double time_s, int spikes_this_step);
    void take_snapshot();
    double mean_conductance() const;

    SimConfig config_;
    PlexusGraph graph_;
    ExponentialRateModel model_;
    std::vector<EdgeState> edges_;
    std::vector<double> conductances_s_;  // scratch: effective conductance per edge
    std::vector<NeuronState> neurons_;
    std::vector<NeuronParams> neuron_params_;
    struct ActiveInput {
        NodeIndex node;
        double amplitude_v;
        double t_start_s;
        double t_stop_s;
    };
    std::vector<ActiveInput> inputs_;
    std::vector<NodeIndex> input_nodes_;
    MnaSolver solver_;
    MnaSolution solution_;
    std::vector<VoltageConstraint> constraints_;
    std::vector<int> in_constraint_idx_;  // per neuron, index into this step's constraints
    std::vector<double> applied_now_;     // per neuron, out-electrode voltage this step
    std::int64_t step_ = 0;
    std::int64_t total_steps_ = 0;
    int memristive_edge_count_ = 0;
    int rate_window_steps_ = 1;
    std::vector<int> window_spike_counts_;  // ring buffer over the rate window
    std::int64_t window_total_ = 0;
    TraceStore traces_;
    TraceSink* sink_ = nullptr;
};

/// Builds and runs a simulation to completion, returning its traces.
TraceStore run(const SimConfig& config);

}  // namespace plexsim
