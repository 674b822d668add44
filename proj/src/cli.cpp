#include "plexsim/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "plexsim/config.hpp"
#include "plexsim/engine.hpp"
#include "plexsim/errors.hpp"
#include "plexsim/traces.hpp"
#include "plexsim/version.hpp"

namespace plexsim {

namespace {

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << contents;
    }
    std::filesystem::rename(tmp, path);
}

struct RunManifest {
    std::string config_file;
    std::string config_fnv1a64;
    std::uint64_t seed = 0;
    std::string code_version;
    double cm_over_dt = 0.0;
    double extent_um = 0.0;
    double sigma_min = 0.0;  // edge conductivity G/l, derived report value
    double sigma_max = 0.0;
    std::string start_time;
    std::string end_time;
    std::vector<std::string> outputs;
    std::string status;
    std::string error;
    std::int64_t steps_completed = 0;
};

void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    nlohmann::json j;
    j["config_file"] = m.config_file;
    j["config_fnv1a64"] = m.config_fnv1a64;
    j["seed"] = m.seed;
    j["code_version"] = m.code_version;
    j["cm_over_dt_F_per_s"] = m.cm_over_dt;
    j["extent_um"] = m.extent_um;
    j["sigma_min_S_per_um"] = m.sigma_min;
    j["sigma_max_S_per_um"] = m.sigma_max;
    j["start_time"] = m.start_time;
    j["end_time"] = m.end_time;
    j["outputs"] = m.outputs;
    j["status"] = m.status;
    if (!m.error.empty()) j["error"] = m.error;
    j["steps_completed"] = m.steps_completed;
    write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

int report_config_error(const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
}

}  // namespace

std::filesystem::path resolve_out_dir(const std::filesystem::path& arg) {
    if (!arg.empty()) return arg;
    if (const char* env = std::getenv("PLEXSIM_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "plexsim_out";
}

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            const std::vector<std::string>& overrides, const std::filesystem::path& dump_mna) {
    RunManifest manifest;
    manifest.code_version = kVersion;
    manifest.start_time = iso_utc_now();

    std::string config_bytes;
    SimConfig config;
    try {
        config_bytes = read_file(config_path);
        config = parse_config(config_bytes, overrides);
        config.validate();
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const std::filesystem::path dir = resolve_out_dir(out_dir);
    std::filesystem::create_directories(dir);

    // The stored copy plus the manifest is enough to reproduce the run.
    {
        std::ofstream copy(dir / "config.cfg", std::ios::binary | std::ios::trunc);
        copy << config_bytes;
        if (!overrides.empty()) {
            copy << "\n# applied overrides:\n";
            for (const std::string& ov : overrides) copy << "# " << ov << '\n';
        }
    }
    manifest.config_file = "config.cfg";
    manifest.config_fnv1a64 = hex64(fnv1a64(config_bytes));
    manifest.seed = config.seed;
    manifest.cm_over_dt = config.effective_cm_over_dt();
    manifest.sigma_min = config.memristor.g_min / config.grid.cell_size_um;
    manifest.sigma_max = config.memristor.g_max / config.grid.cell_size_um;
    manifest.outputs.push_back("config.cfg");

    try {
        Simulation sim(config);
        manifest.extent_um = sim.graph().extent_um(config.grid.extent_mode);

        {
            std::ofstream g(dir / "graph.txt", std::ios::trunc);
            write_graph_text(sim.graph(), g);
            manifest.outputs.push_back("graph.txt");
        }
        if (!dump_mna.empty()) {
            std::ofstream dump(dump_mna, std::ios::trunc);
            sim.assemble_next_system().write_triplets(dump);
        }

        CsvTraceSink sink(dir, config.record.applied_voltage,
                          config.record.snapshot_every_steps > 0);
        sim.attach_sink(&sink);
        // The t = 0 sample was recorded at construction, before the sink
        // existed; replay it so files carry the full series.
        sink.on_sample(0.0, sim.traces().mean_g.front(), sim.traces().rate_hz.front(),
                       sim.traces().applied_v.front());
        if (!sim.traces().snapshots.empty()) sink.on_snapshot(sim.traces().snapshots.front());

        sim.run_all();

        for (const std::string& f : sink.files()) manifest.outputs.push_back(f);
        manifest.steps_completed = sim.step_index();
        manifest.status = "ok";
        manifest.end_time = iso_utc_now();
        write_manifest(manifest, dir);
        return kExitOk;
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        manifest.status = "error";
        manifest.error = e.what();
        manifest.end_time = iso_utc_now();
        write_manifest(manifest, dir);
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_validate(const std::filesystem::path& config_path, std::ostream& out,
                 const std::vector<std::string>& overrides) {
    try {
        SimConfig config = load_config(config_path, overrides);
        config.validate();
        resolve_placements(config);
        // Full placement/collision validation without stepping.
        Simulation sim(config);
        out << normalized_config(sim.config());
        return kExitOk;
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_place_inputs(const std::filesystem::path& image_path, const PlaceInputsOptions& options,
                     const std::filesystem::path& output) {
    try {
        if (options.k < 1) throw ConfigError("k", "must be at least 1");
        const RasterImage image = load_pgm(image_path);
        const PlexusGraph graph =
            build_grid(options.grid_width, options.grid_height, 25.0, 0.0, 0);
        const InputPlacement placement =
            place_inputs_from_image(image, options.k, graph, options.region);

        std::ostringstream frag;
        frag << "# input placement from " << image_path.filename().string() << ", k="
             << options.k << ", region (" << options.region.col0 << ',' << options.region.row0
             << ")..(" << options.region.col1 << ',' << options.region.row1 << ")\n";
        frag << "[inputs]\n";
        for (const NodeIndex node : placement.nodes) {
            const int col = static_cast<int>(node) % options.grid_width;
            const int row = static_cast<int>(node) / options.grid_width;
            frag << "input = node (" << col << ',' << row << ") amplitude "
                 << format_value(options.amplitude_v) << " start "
                 << format_value(options.t_start_s) << " stop " << format_value(options.t_stop_s)
                 << '\n';
        }
        if (output == "-") {
            std::cout << frag.str();
        } else {
            std::ofstream out(output, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open output file " + output.string());
            out << frag.str();
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "place-inputs error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_sweep(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
              const SweepOptions& options) {
    struct Combo {
        std::string name;
        std::vector<std::string> overrides;
    };
    std::vector<Combo> combos{{"", options.overrides}};

    try {
        for (const std::string& axis : options.grid_axes) {
            const std::size_t eq = axis.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(axis, "grid axis must look like key=v1,v2,...");
            }
            const std::string key = axis.substr(0, eq);
            std::vector<std::string> values;
            std::istringstream vs(axis.substr(eq + 1));
            std::string v;
            while (std::getline(vs, v, ',')) values.push_back(v);
            if (values.empty()) throw ConfigError(axis, "grid axis has no values");
            std::vector<Combo> next;
            for (const Combo& c : combos) {
                for (const std::string& val : values) {
                    Combo n = c;
                    n.name += (n.name.empty() ? "" : "__") + key + "-" + val;
                    n.overrides.push_back(key + "=" + val);
                    next.push_back(std::move(n));
                }
            }
            combos = std::move(next);
        }
    } catch (const ConfigError& e) {
        return report_config_error(e);
    }

    std::vector<std::uint64_t> seeds = options.seeds;
    if (seeds.empty()) seeds.push_back(0);

    struct Job {
        std::string dir_name;
        std::vector<std::string> overrides;
    };
    std::vector<Job> jobs;
    for (const Combo& c : combos) {
        for (const std::uint64_t seed : seeds) {
            Job j;
            j.dir_name = "seed-" + std::to_string(seed) + (c.name.empty() ? "" : "__" + c.name);
            j.overrides = c.overrides;
            j.overrides.push_back("run.seed=" + std::to_string(seed));
            jobs.push_back(std::move(j));
        }
    }

    const std::filesystem::path dir = resolve_out_dir(out_dir);
    std::filesystem::create_directories(dir);

    std::atomic<std::size_t> cursor{0};
    std::atomic<int> worst{kExitOk};
    std::mutex log_mutex;
    const int nthreads = std::max(1, options.jobs);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= jobs.size()) return;
                const Job& job = jobs[i];
                const int rc = cmd_run(config_path, dir / job.dir_name, job.overrides);
                {
                    std::lock_guard<std::mutex> lock(log_mutex);
                    std::cout << job.dir_name << ": "
                              << (rc == kExitOk ? "ok" : "failed (exit " + std::to_string(rc) + ")")
                              << '\n';
                }
                int expected = worst.load();
                while (rc > expected && !worst.compare_exchange_weak(expected, rc)) {}
            }
        });
    }
    for (std::thread& t : pool) t.join();
    return worst.load();
}

}  // namespace plexsim
