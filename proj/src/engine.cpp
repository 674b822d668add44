#include "plexsim/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "plexsim/errors.hpp"
#include "plexsim/rng.hpp"

namespace plexsim {

namespace {

constexpr double kPaperCmOverDt = 3.5e-20;  // device-sheet value, see NeuronParams

void check(bool ok, const char* field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

}  // namespace

double SimConfig::effective_cm_over_dt() const {
    return use_datasheet_cm_over_dt ? kPaperCmOverDt : lif.cm_over_dt;
}

std::int64_t SimConfig::total_steps() const {
    return std::llround(t_end / dt);
}

void SimConfig::validate() const {
    check(grid.width >= 2, "grid.width", "must be at least 2");
    check(grid.height >= 2, "grid.height", "must be at least 2");
    check(grid.cell_size_um > 0.0, "grid.cell_size", "must be positive");
    check(grid.diagonal_fraction >= 0.0 && grid.diagonal_fraction <= 1.0,
          "grid.diagonal_fraction", "must lie in [0,1]");
    check(grid.ohmic_fraction >= 0.0 && grid.ohmic_fraction <= 1.0,
          "grid.ohmic_fraction", "must lie in [0,1]");
    check(grid.g_init >= 0.0 && grid.g_init <= 1.0, "grid.g_init", "must lie in [0,1]");
    if (grid.g_init_max >= 0.0) {
        check(grid.g_init_max >= grid.g_init && grid.g_init_max <= 1.0, "grid.g_init",
              "upper bound of the random range must lie in [g_init,1]");
    }

    try {
        memristor.validate();
    } catch (const std::exception& e) {
        throw ConfigError("memristor", e.what());
    }
    NeuronParams effective = lif;
    effective.cm_over_dt = effective_cm_over_dt();
    try {
        effective.validate();
    } catch (const std::exception& e) {
        throw ConfigError("lif", e.what());
    }

    check(dt > 0.0, "run.dt", "dt must be positive");
    check(t_end >= dt, "run.t_end", "must cover at least one step");
    const std::int64_t steps = std::llround(t_end / dt);
    check(steps >= 1 && std::abs(steps * dt - t_end) <= 1e-9 * t_end, "run.t_end",
          "must be an integer multiple of dt");

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const InputSpec& in = inputs[i];
        const std::string field = "inputs.input[" + std::to_string(i) + "]";
        check(in.col >= 0 && in.col < grid.width && in.row >= 0 && in.row < grid.height,
              field.c_str(), "node outside grid");
        check(std::isfinite(in.amplitude_v), field.c_str(), "amplitude must be finite");
        check(in.t_start_s >= 0.0 && in.t_stop_s > in.t_start_s && in.t_stop_s <= t_end,
              field.c_str(), "window must satisfy 0 <= start < stop <= t_end");
    }

    for (std::size_t i = 0; i < neurons.size(); ++i) {
        const NeuronPlacement& n = neurons[i];
        const std::string field = "neurons.neuron[" + std::to_string(i) + "]";
        const auto in_range = [&](int c, int r) {
            return c >= 0 && c < grid.width && r >= 0 && r < grid.height;
        };
        check(in_range(n.in_col, n.in_row) && in_range(n.out_col, n.out_row), field.c_str(),
              "electrode outside grid");
        check(n.in_col != n.out_col || n.in_row != n.out_row, field.c_str(),
              "in and out electrodes must be distinct nodes");
        NeuronParams p = lif;
        p.cm_over_dt = effective_cm_over_dt();
        if (n.tau_m) p.tau_m = *n.tau_m;
        if (n.v_th) p.v_th = *n.v_th;
        if (n.t_p) p.t_p = *n.t_p;
        if (n.t_n) p.t_n = *n.t_n;
        if (n.a_p) p.a_p = *n.a_p;
        if (n.a_n) p.a_n = *n.a_n;
        try {
            p.validate();
        } catch (const std::exception& e) {
            throw ConfigError(field, e.what());
        }
    }

    check(random_neuron_count >= 0, "neurons.random_count", "must be non-negative");
    if (neuron_exclude) {
        const NodeRect& r = *neuron_exclude;
        check(r.col0 >= 0 && r.row0 >= 0 && r.col1 >= r.col0 && r.row1 >= r.row0 &&
                  r.col1 < grid.width && r.row1 < grid.height,
              "neurons.exclude", "rectangle outside grid");
    }
    if (record.rate_window_s >= 0.0) {
        check(record.rate_window_s > 0.0, "record.rate_window", "must be positive");
    }
    check(record.snapshot_every_steps >= 0, "record.snapshot_every", "must be non-negative");
}

void resolve_placements(SimConfig& config) {
    if (config.random_neuron_count <= 0) return;

    std::vector<char> occupied(
        static_cast<std::size_t>(config.grid.width) * config.grid.height, 0);
    const auto mark = [&](int col, int row) {
        occupied[static_cast<std::size_t>(row) * config.grid.width + col] = 1;
    };
    const auto taken = [&](int col, int row) {
        return occupied[static_cast<std::size_t>(row) * config.grid.width + col] != 0;
    };
    for (const InputSpec& in : config.inputs) mark(in.col, in.row);
    for (const NeuronPlacement& n : config.neurons) {
        mark(n.in_col, n.in_row);
        mark(n.out_col, n.out_row);
    }

    Rng rng(config.seed, RngStream::neuron_layout);
    const int want = config.random_neuron_count;
    for (int placed = 0; placed < want;) {
        bool ok = false;
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const int col = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.grid.width - 1)));
            const int row = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.grid.height)));
            if (config.neuron_exclude &&
                (config.neuron_exclude->contains(col, row) ||
                 config.neuron_exclude->contains(col + 1, row))) {
                continue;
            }
            if (taken(col, row) || taken(col + 1, row)) continue;
            config.neurons.push_back({col, row, col + 1, row, {}, {}, {}, {}, {}, {}});
            mark(col, row);
            mark(col + 1, row);
            ok = true;
            break;
        }
        if (!ok) {
            throw ConfigError("neurons.random_count",
                              "could not place " + std::to_string(want) +
                                  " neurons without collisions");
        }
        ++placed;
    }
    config.random_neuron_count = 0;
}

namespace {

SimConfig prepare(SimConfig config) {
    config.validate();
    resolve_placements(config);
    return config;
}

}  // namespace

Simulation::Simulation(SimConfig config)
    : config_(prepare(std::move(config))),
      graph_(build_grid(config_.grid.width, config_.grid.height, config_.grid.cell_size_um,
                        config_.grid.diagonal_fraction, config_.seed)),
      model_(config_.memristor),
      solver_(graph_) {
    total_steps_ = config_.total_steps();

    // Edge states: ohmic flags and initial conductances come from their own
    // seed streams, so one draw pattern never shifts the other.
    edges_.resize(graph_.edge_count());
    {
        Rng ohmic_rng(config_.seed, RngStream::ohmic_edges);
        for (EdgeState& e : edges_) e.ohmic = ohmic_rng.bernoulli(config_.grid.ohmic_fraction);
        Rng g_rng(config_.seed, RngStream::initial_conductance);
        for (EdgeState& e : edges_) {
            const double g = (config_.grid.g_init_max >= 0.0)
                                 ? g_rng.uniform(config_.grid.g_init, config_.grid.g_init_max)
                                 : config_.grid.g_init;
            e.g = e.ohmic ? 0.0 : g;
        }
    }
    memristive_edge_count_ =
        static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                       [](const EdgeState& e) { return !e.ohmic; }));
    conductances_s_.resize(edges_.size());

    // Electrode placement; every electrode of any kind owns its node alone.
    std::unordered_map<NodeIndex, std::string> owner;
    const auto claim = [&](NodeIndex node, const std::string& who, const char* field) {
        const auto [it, inserted] = owner.emplace(node, who);
        if (!inserted) {
            throw ConfigError(field, "node " + std::to_string(node) + " claimed by both " +
                                         it->second + " and " + who);
        }
    };
    const double cm_over_dt = config_.effective_cm_over_dt();
    neurons_.reserve(config_.neurons.size());
    neuron_params_.reserve(config_.neurons.size());
    for (std::size_t i = 0; i < config_.neurons.size(); ++i) {
        const NeuronPlacement& pl = config_.neurons[i];
        NeuronState st;
        st.in_node = node_at(graph_, pl.in_col, pl.in_row);
        st.out_node = node_at(graph_, pl.out_col, pl.out_row);
        claim(st.in_node, "neuron " + std::to_string(i) + " (in)", "neurons");
        claim(st.out_node, "neuron " + std::to_string(i) + " (out)", "neurons");
        neurons_.push_back(std::move(st));
        NeuronParams p = config_.lif;
        p.cm_over_dt = cm_over_dt;
        if (pl.tau_m) p.tau_m = *pl.tau_m;
        if (pl.v_th) p.v_th = *pl.v_th;
        if (pl.t_p) p.t_p = *pl.t_p;
        if (pl.t_n) p.t_n = *pl.t_n;
        if (pl.a_p) p.a_p = *pl.a_p;
        if (pl.a_n) p.a_n = *pl.a_n;
        neuron_params_.push_back(p);
    }
    for (std::size_t i = 0; i < config_.inputs.size(); ++i) {
        const InputSpec& in = config_.inputs[i];
        const NodeIndex node = node_at(graph_, in.col, in.row);
        claim(node, "input " + std::to_string(i), "inputs");
        inputs_.push_back({node, in.amplitude_v, in.t_start_s, in.t_stop_s});
        input_nodes_.push_back(node);
    }

    in_constraint_idx_.assign(neurons_.size(), -1);
    applied_now_.assign(neurons_.size(), 0.0);

    const double window_s =
        (config_.record.rate_window_s > 0.0) ? config_.record.rate_window_s : 50.0 * config_.dt;
    rate_window_steps_ = std::max<int>(1, static_cast<int>(std::llround(window_s / config_.dt)));
    window_spike_counts_.assign(rate_window_steps_, 0);

    record_sample(0.0, 0);
}

void Simulation::gather_constraints(double t_now,
                                    std::vector<VoltageConstraint>& out) const {
    const double half_step = 0.5 * config_.dt;
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        const ActiveInput& in = inputs_[i];
        if (t_now >= in.t_start_s - half_step && t_now < in.t_stop_s - half_step) {
            out.push_back({in.node, in.amplitude_v, -static_cast<int>(i) - 1});
        }
    }
    for (std::size_t i = 0; i < neurons_.size(); ++i) {
        electrode_constraints(neurons_[i], neuron_params_[i], static_cast<int>(i), out);
    }
}

MnaSystem Simulation::assemble_next_system() const {
    std::vector<VoltageConstraint> constraints;
    gather_constraints(time_now(), constraints);
    std::vector<double> cond(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) cond[i] = model_.conductance(edges_[i].g);
    return assemble(graph_, cond, std::move(constraints));
}

void Simulation::step() {
    const double t_now = static_cast<double>(step_) * config_.dt;
    const double t_next = static_cast<double>(step_ + 1) * config_.dt;

    // 1) pulses primed by the previous membrane update are live now; collect
    //    this step's constraints (inputs in window, pulse electrodes, and the
    //    always-grounded in-electrodes).
    constraints_.clear();
    const double half_step = 0.5 * config_.dt;
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        const ActiveInput& in = inputs_[i];
        if (t_now >= in.t_start_s - half_step && t_now < in.t_stop_s - half_step) {
            constraints_.push_back({in.node, in.amplitude_v, -static_cast<int>(i) - 1});
        }
    }
    for (std::size_t i = 0; i < neurons_.size(); ++i) {
        in_constraint_idx_[i] = static_cast<int>(constraints_.size());
        electrode_constraints(neurons_[i], neuron_params_[i], static_cast<int>(i), constraints_);
        applied_now_[i] = applied_voltage(neurons_[i], neuron_params_[i]);
    }

    // 2) solve the voltage distribution and source currents.
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        conductances_s_[i] = model_.conductance(edges_[i].g);
    }
    try {
        solution_ = solver_.solve(conductances_s_, constraints_);
    } catch (const NumericalError& e) {
        const std::string msg = std::string(e.what()) + " (step " + std::to_string(step_) + ")";
        if (sink_) sink_->on_error(msg, step_);
        throw NumericalError(msg);
    }

    // 3) every edge relaxes toward the attractor set by this step's frozen
    //    voltage difference.
    const auto& v = solution_.node_voltages;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        EdgeState& es = edges_[i];
        if (es.ohmic) continue;
        const GraphEdge& ge = graph_.edges()[i];
        es.g = model_.update(es.g, std::abs(v[ge.a] - v[ge.b]), config_.dt);
    }

    // 4) membranes integrate this step's in-electrode currents; pulsing
    //    neurons advance their clocks instead and discard inflow.
    int spikes_this_step = 0;
    for (std::size_t i = 0; i < neurons_.size(); ++i) {
        NeuronState& n = neurons_[i];
        if (n.phase == NeuronPhase::integrating) {
            const double i_ext = solution_.source_currents[in_constraint_idx_[i]];
            if (step_membrane(n, i_ext, config_.dt, t_next, neuron_params_[i])) {
                ++spikes_this_step;
                const SpikeEvent ev{static_cast<int>(i), t_next};
                traces_.spikes.push_back(ev);
                if (sink_) sink_->on_spike(ev);
            }
        } else {
            advance_pulse(n, config_.dt, neuron_params_[i]);
        }
    }

    ++step_;
    record_sample(t_next, spikes_this_step);
}

void Simulation::run_all() {
    while (step_ < total_steps_) step();
}

double Simulation::mean_conductance() const {
    if (memristive_edge_count_ == 0) return 0.0;
    double sum = 0.0;
    for (const EdgeState& e : edges_) {
        if (!e.ohmic) sum += e.g;
    }
    return sum / memristive_edge_count_;
}

void Simulation::record_sample(double time_s, int spikes_this_step) {
    double rate = 0.0;
    if (step_ > 0) {
        const int slot = static_cast<int>((step_ - 1) % rate_window_steps_);
        window_total_ -= window_spike_counts_[slot];
        window_spike_counts_[slot] = spikes_this_step;
        window_total_ += spikes_this_step;
        const double window_s = rate_window_steps_ * config_.dt;
        rate = neurons_.empty()
                   ? 0.0
                   : static_cast<double>(window_total_) /
                         (window_s * static_cast<double>(neurons_.size()));
    }

    traces_.times_s.push_back(time_s);
    traces_.mean_g.push_back(mean_conductance());
    traces_.rate_hz.push_back(rate);
    traces_.applied_v.push_back(applied_now_);
    if (sink_) sink_->on_sample(time_s, traces_.mean_g.back(), rate, applied_now_);

    const int every = config_.record.snapshot_every_steps;
    if (every > 0 && (step_ % every == 0 || step_ == total_steps_)) take_snapshot();
}

void Simulation::take_snapshot() {
    FieldSnapshot snap;
    snap.step = step_;
    snap.time_s = static_cast<double>(step_) * config_.dt;
    snap.node_voltages = solution_.node_voltages.empty()
                             ? std::vector<double>(graph_.node_count(), 0.0)
                             : solution_.node_voltages;
    snap.edge_g.reserve(edges_.size());
    for (const EdgeState& e : edges_) snap.edge_g.push_back(e.g);
    if (sink_) sink_->on_snapshot(snap);
    traces_.snapshots.push_back(std::move(snap));
}

namespace {

constexpr char kStateMagic[8] = {'P', 'L', 'X', 'S', 'I', 'M', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

double read_f64(std::istream& in) {
    return std::bit_cast<double>(read_u64(in));
}

}  // namespace

void Simulation::save_state(std::ostream& out) const {
    out.write(kStateMagic, sizeof(kStateMagic));
    write_u64(out, static_cast<std::uint64_t>(step_));
    write_u64(out, edges_.size());
    for (const EdgeState& e : edges_) {
        write_f64(out, e.g);
        out.put(e.ohmic ? 1 : 0);
    }
    write_u64(out, neurons_.size());
    for (const NeuronState& n : neurons_) {
        write_f64(out, n.v_m);
        out.put(static_cast<char>(n.phase));
        write_f64(out, n.phase_time_left);
        write_u64(out, n.spike_times.size());
        for (double t : n.spike_times) write_f64(out, t);
    }
    write_u64(out, window_spike_counts_.size());
    for (int c : window_spike_counts_) write_u64(out, static_cast<std::uint64_t>(c));
    write_u64(out, static_cast<std::uint64_t>(window_total_));
}

void Simulation::load_state(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kStateMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("not a simulation state file");
    }
    step_ = static_cast<std::int64_t>(read_u64(in));
    if (read_u64(in) != edges_.size()) {
        throw std::runtime_error("state file does not match configured edge count");
    }
    for (EdgeState& e : edges_) {
        e.g = read_f64(in);
        const bool ohmic = in.get() != 0;
        if (ohmic != e.ohmic) {
            throw std::runtime_error("state file ohmic pattern does not match config");
        }
    }
    if (read_u64(in) != neurons_.size()) {
        throw std::runtime_error("state file does not match configured neuron count");
    }
    for (NeuronState& n : neurons_) {
        n.v_m = read_f64(in);
        n.phase = static_cast<NeuronPhase>(in.get());
        n.phase_time_left = read_f64(in);
        n.spike_times.resize(read_u64(in));
        for (double& t : n.spike_times) t = read_f64(in);
    }
    if (read_u64(in) != window_spike_counts_.size()) {
        throw std::runtime_error("state file rate window does not match config");
    }
    for (int& c : window_spike_counts_) c = static_cast<int>(read_u64(in));
    window_total_ = static_cast<std::int64_t>(read_u64(in));
    if (!in) throw std::runtime_error("truncated simulation state file");
}

TraceStore run(const SimConfig& config) {
    Simulation sim(config);
    sim.run_all();
    return sim.traces();
}

}  // namespace plexsim
