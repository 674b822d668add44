#include "plexsim/traces.hpp"

#include <cstdio>
#include <stdexcept>

namespace plexsim {

double firing_rate(std::span<const SpikeEvent> spikes, double window_s, double t_s,
                   int neuron_count) {
    if (!(window_s > 0.0)) throw std::invalid_argument("rate window must be positive");
    if (neuron_count <= 0) return 0.0;
    std::size_t count = 0;
    for (const SpikeEvent& s : spikes) {
        if (s.time_s > t_s - window_s && s.time_s <= t_s) ++count;
    }
    return static_cast<double>(count) / (window_s * neuron_count);
}

std::string format_value(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

CsvTraceSink::CsvTraceSink(const std::filesystem::path& out_dir, bool applied_voltage,
                           bool snapshots)
    : dir_(out_dir), write_applied_(applied_voltage), write_snapshots_(snapshots) {
    std::filesystem::create_directories(dir_);
    const auto open = [&](std::ofstream& f, const char* name, const char* header) {
        f.open(dir_ / name, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open trace file " + (dir_ / name).string());
        f << header << '\n';
        files_.emplace_back(name);
    };
    open(spikes_, "spikes.csv", "neuron_id,time_s");
    open(mean_g_, "mean_g.csv", "time_s,mean_g");
    open(rate_, "rate.csv", "time_s,rate_hz");
    if (write_applied_) {
        open(applied_, "applied_voltage.csv", "time_s,neuron_id,applied_V");
    }
    if (write_snapshots_) {
        std::filesystem::create_directories(dir_ / "snapshots");
    }
}

void CsvTraceSink::on_sample(double time_s, double mean_g, double rate_hz,
                             std::span<const double> applied_v) {
    const std::string t = format_value(time_s);
    mean_g_ << t << ',' << format_value(mean_g) << '\n';
    rate_ << t << ',' << format_value(rate_hz) << '\n';
    if (write_applied_) {
        for (std::size_t i = 0; i < applied_v.size(); ++i) {
            applied_ << t << ',' << i << ',' << format_value(applied_v[i]) << '\n';
        }
    }
    // Keep time series inspectable while a long run is still going.
    mean_g_.flush();
    rate_.flush();
}

void CsvTraceSink::on_spike(const SpikeEvent& spike) {
    spikes_ << spike.neuron << ',' << format_value(spike.time_s) << '\n';
    spikes_.flush();
}

void CsvTraceSink::on_snapshot(const FieldSnapshot& snapshot) {
    if (!write_snapshots_) return;
    char name[64];
    std::snprintf(name, sizeof(name), "snapshots/snapshot_%06lld.csv",
                  static_cast<long long>(snapshot.step));
    std::ofstream f(dir_ / name, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open snapshot file");
    f << "kind,index,value\n";
    f << "# time_s " << format_value(snapshot.time_s) << '\n';
    for (std::size_t i = 0; i < snapshot.node_voltages.size(); ++i) {
        f << "node," << i << ',' << format_value(snapshot.node_voltages[i]) << '\n';
    }
    for (std::size_t i = 0; i < snapshot.edge_g.size(); ++i) {
        f << "edge," << i << ',' << format_value(snapshot.edge_g[i]) << '\n';
    }
    files_.emplace_back(name);
}

void CsvTraceSink::on_error(const std::string& message, std::int64_t step) {
    const std::string marker = "# error at step " + std::to_string(step) + ": " + message;
    spikes_ << marker << '\n';
    mean_g_ << marker << '\n';
    rate_ << marker << '\n';
    if (write_applied_) applied_ << marker << '\n';
    spikes_.flush();
    mean_g_.flush();
    rate_.flush();
    if (write_applied_) applied_.flush();
}

}  // namespace plexsim
