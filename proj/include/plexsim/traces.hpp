#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace plexsim {

struct SpikeEvent {
    int neuron;
    double time_s;

    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

/// Full-field capture behind the rendered field views: every node voltage
/// from the step's solve and every normalized edge conductance after it.
struct FieldSnapshot {
    std::int64_t step = 0;  // completed steps at capture time
    double time_s = 0.0;
    std::vector<double> node_voltages;
    std::vector<double> edge_g;
};

/// Time-indexed recordings of one run. Per-sample vectors are aligned with
/// times_s, which covers 0, dt, ..., t_end; spikes are sparse events.
struct TraceStore {
    std::vector<SpikeEvent> spikes;
    std::vector<double> times_s;
    std::vector<double> mean_g;    // average over memristive edges
    std::vector<double> rate_hz;   // windowed network-average firing rate
    std::vector<std::vector<double>> applied_v;  // per sample: one value per neuron
    std::vector<FieldSnapshot> snapshots;
};

/// Network-average firing rate: spike count in (t - window, t] divided by
/// (window * neuron_count). Throws std::invalid_argument for window <= 0;
/// zero neurons give 0 Hz.
double firing_rate(std::span<const SpikeEvent> spikes, double window_s, double t_s,
                   int neuron_count);

/// Streaming observer; the engine reports every sample as it is produced so
/// long runs stay inspectable on disk mid-flight.
class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_sample(double time_s, double mean_g, double rate_hz,
                           std::span<const double> applied_v) = 0;
    virtual void on_spike(const SpikeEvent& spike) = 0;
    virtual void on_snapshot(const FieldSnapshot& snapshot) = 0;
    /// Mid-run failure: flush whatever was written and mark it.
    virtual void on_error(const std::string& message, std::int64_t step) = 0;
};

/// Writes the CSV trace files (spikes.csv, mean_g.csv, rate.csv,
/// applied_voltage.csv and snapshots/snapshot_STEP.csv) into a directory,
/// appending row by row. Headers carry explicit units.
class CsvTraceSink final : public TraceSink {
public:
    CsvTraceSink(const std::filesystem::path& out_dir, bool applied_voltage,
                 bool snapshots);

    void on_sample(double time_s, double mean_g, double rate_hz,
                   std::span<const double> applied_v) override;
    void on_spike(const SpikeEvent& spike) override;
    void on_snapshot(const FieldSnapshot& snapshot) override;
    void on_error(const std::string& message, std::int64_t step) override;

    /// Files created so far, relative to the output directory.
    [[nodiscard]] const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::ofstream spikes_;
    std::ofstream mean_g_;
    std::ofstream rate_;
    std::ofstream applied_;
    bool write_applied_;
    bool write_snapshots_;
    std::vector<std::string> files_;
};

/// Locale-independent shortest-reasonable formatting used by all trace and
/// report writers ("%.12g").
std::string format_value(double value);

}  // namespace plexsim
