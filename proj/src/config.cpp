#include "plexsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "plexsim/errors.hpp"

namespace plexsim {

namespace {

enum class Dim { none, time_s, volts, siemens, length_um };

struct UnitEntry {
    const char* suffix;
    double factor;
};

constexpr UnitEntry kTimeUnits[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
constexpr UnitEntry kVoltUnits[] = {{"V", 1.0}, {"mV", 1e-3}};
constexpr UnitEntry kSiemensUnits[] = {
    {"S", 1.0}, {"mS", 1e-3}, {"uS", 1e-6}, {"nS", 1e-9}, {"pS", 1e-12}};
constexpr UnitEntry kLengthUnits[] = {{"um", 1.0}, {"mm", 1e3}, {"m", 1e6}, {"nm", 1e-3}};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError(field, message);
}

double parse_value(const std::string& raw, Dim dim, const std::string& field) {
    const std::string s = trim(raw);
    if (s.empty()) fail(field, "missing value");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) fail(field, "'" + s + "' is not a number");
    const std::string suffix = trim(std::string(end));
    if (suffix.empty()) return v;

    const auto lookup = [&](const UnitEntry* table, std::size_t n) -> double {
        for (std::size_t i = 0; i < n; ++i) {
            if (suffix == table[i].suffix) return v * table[i].factor;
        }
        fail(field, "unknown unit suffix '" + suffix + "'");
    };
    switch (dim) {
        case Dim::time_s: return lookup(kTimeUnits, std::size(kTimeUnits));
        case Dim::volts: return lookup(kVoltUnits, std::size(kVoltUnits));
        case Dim::siemens: return lookup(kSiemensUnits, std::size(kSiemensUnits));
        case Dim::length_um: return lookup(kLengthUnits, std::size(kLengthUnits));
        case Dim::none: break;
    }
    fail(field, "key takes a plain number, got suffix '" + suffix + "'");
}

long parse_int(const std::string& raw, const std::string& field) {
    const std::string s = trim(raw);
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') fail(field, "'" + s + "' is not an integer");
    return v;
}

std::uint64_t parse_u64(const std::string& raw, const std::string& field) {
    const std::string s = trim(raw);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end == s.c_str() || *end != '\0') {
        fail(field, "'" + s + "' is not an unsigned integer");
    }
    return v;
}

bool parse_bool(const std::string& raw, const std::string& field) {
    const std::string s = trim(raw);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(field, "'" + s + "' is not a boolean (true/false)");
}

// "(col,row)" with no interior whitespace.
std::pair<int, int> parse_coord(const std::string& tok, const std::string& field) {
    int c = 0;
    int r = 0;
    char tail = 0;
    if (std::sscanf(tok.c_str(), "(%d,%d%c", &c, &r, &tail) != 3 || tail != ')') {
        fail(field, "'" + tok + "' is not a coordinate pair (col,row)");
    }
    return {c, r};
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

NeuronPlacement parse_neuron(const std::string& value, const std::string& field) {
    const std::vector<std::string> toks = split_ws(value);
    if (toks.size() < 4 || toks[0] != "in" || toks[2] != "out") {
        fail(field, "expected 'in (c,r) out (c,r) [param=value ...]'");
    }
    NeuronPlacement n;
    std::tie(n.in_col, n.in_row) = parse_coord(toks[1], field);
    std::tie(n.out_col, n.out_row) = parse_coord(toks[3], field);
    for (std::size_t i = 4; i < toks.size(); ++i) {
        const std::size_t eq = toks[i].find('=');
        if (eq == std::string::npos) fail(field, "expected param=value, got '" + toks[i] + "'");
        const std::string key = toks[i].substr(0, eq);
        const std::string val = toks[i].substr(eq + 1);
        if (key == "tau_m") n.tau_m = parse_value(val, Dim::time_s, field);
        else if (key == "v_th") n.v_th = parse_value(val, Dim::volts, field);
        else if (key == "t_p") n.t_p = parse_value(val, Dim::time_s, field);
        else if (key == "t_n") n.t_n = parse_value(val, Dim::time_s, field);
        else if (key == "a_p") n.a_p = parse_value(val, Dim::volts, field);
        else if (key == "a_n") n.a_n = parse_value(val, Dim::volts, field);
        else fail(field, "unknown neuron parameter '" + key + "'");
    }
    return n;
}

InputSpec parse_input(const std::string& value, const std::string& field) {
    const std::vector<std::string> toks = split_ws(value);
    if (toks.size() != 8 || toks[0] != "node" || toks[2] != "amplitude" || toks[4] != "start" ||
        toks[6] != "stop") {
        fail(field, "expected 'node (c,r) amplitude <V> start <time> stop <time>'");
    }
    InputSpec in;
    std::tie(in.col, in.row) = parse_coord(toks[1], field);
    in.amplitude_v = parse_value(toks[3], Dim::volts, field);
    in.t_start_s = parse_value(toks[5], Dim::time_s, field);
    in.t_stop_s = parse_value(toks[7], Dim::time_s, field);
    return in;
}

NodeRect parse_rect(const std::string& value, const std::string& field) {
    const std::string s = trim(value);
    const std::size_t dots = s.find("..");
    if (dots == std::string::npos) fail(field, "expected '(c0,r0)..(c1,r1)'");
    NodeRect r;
    std::tie(r.col0, r.row0) = parse_coord(trim(s.substr(0, dots)), field);
    std::tie(r.col1, r.row1) = parse_coord(trim(s.substr(dots + 2)), field);
    return r;
}

struct Builder {
    SimConfig cfg;
    std::set<std::string> seen;

    void set(const std::string& section, const std::string& key, const std::string& value,
             bool is_override) {
        const std::string field = section + "." + key;
        const bool repeatable = (key == "neuron" || key == "input");
        if (repeatable && is_override) fail(field, "list keys cannot be overridden");
        if (!repeatable && !is_override && !seen.insert(field).second) {
            fail(field, "duplicate key");
        }

        if (section == "grid") {
            if (key == "width") cfg.grid.width = static_cast<int>(parse_int(value, field));
            else if (key == "height") cfg.grid.height = static_cast<int>(parse_int(value, field));
            else if (key == "cell_size") cfg.grid.cell_size_um = parse_value(value, Dim::length_um, field);
            else if (key == "diagonal_fraction") cfg.grid.diagonal_fraction = parse_value(value, Dim::none, field);
            else if (key == "ohmic_fraction") cfg.grid.ohmic_fraction = parse_value(value, Dim::none, field);
            else if (key == "g_init") parse_g_init(value, field);
            else if (key == "extent_mode") parse_extent(value, field);
            else fail(field, "unknown key");
        } else if (section == "memristor") {
            if (key == "k_p0") cfg.memristor.k_p0 = parse_value(value, Dim::none, field);
            else if (key == "k_d0") cfg.memristor.k_d0 = parse_value(value, Dim::none, field);
            else if (key == "eta_p") cfg.memristor.eta_p = parse_value(value, Dim::none, field);
            else if (key == "eta_d") cfg.memristor.eta_d = parse_value(value, Dim::none, field);
            else if (key == "g_min") cfg.memristor.g_min = parse_value(value, Dim::siemens, field);
            else if (key == "g_max") cfg.memristor.g_max = parse_value(value, Dim::siemens, field);
            else fail(field, "unknown key");
        } else if (section == "lif") {
            if (key == "tau_m") cfg.lif.tau_m = parse_value(value, Dim::time_s, field);
            else if (key == "v_th") cfg.lif.v_th = parse_value(value, Dim::volts, field);
            else if (key == "t_p") cfg.lif.t_p = parse_value(value, Dim::time_s, field);
            else if (key == "t_n") cfg.lif.t_n = parse_value(value, Dim::time_s, field);
            else if (key == "a_p") cfg.lif.a_p = parse_value(value, Dim::volts, field);
            else if (key == "a_n") cfg.lif.a_n = parse_value(value, Dim::volts, field);
            else if (key == "cm_over_dt") cfg.lif.cm_over_dt = parse_value(value, Dim::none, field);
            else if (key == "use_datasheet_cm_over_dt") cfg.use_datasheet_cm_over_dt = parse_bool(value, field);
            else fail(field, "unknown key");
        } else if (section == "neurons") {
            if (key == "neuron") cfg.neurons.push_back(parse_neuron(value, field));
            else if (key == "random_count") cfg.random_neuron_count = static_cast<int>(parse_int(value, field));
            else if (key == "exclude") cfg.neuron_exclude = parse_rect(value, field);
            else fail(field, "unknown key");
        } else if (section == "inputs") {
            if (key == "input") cfg.inputs.push_back(parse_input(value, field));
            else fail(field, "unknown key");
        } else if (section == "run") {
            if (key == "dt") cfg.dt = parse_value(value, Dim::time_s, field);
            else if (key == "t_end") cfg.t_end = parse_value(value, Dim::time_s, field);
            else if (key == "seed") cfg.seed = parse_u64(value, field);
            else fail(field, "unknown key");
        } else if (section == "record") {
            if (key == "rate_window") cfg.record.rate_window_s = parse_value(value, Dim::time_s, field);
            else if (key == "snapshot_every") cfg.record.snapshot_every_steps = static_cast<int>(parse_int(value, field));
            else if (key == "applied_voltage") cfg.record.applied_voltage = parse_bool(value, field);
            else fail(field, "unknown key");
        } else {
            fail(section, "unknown section");
        }
    }

    void parse_g_init(const std::string& value, const std::string& field) {
        const std::string s = trim(value);
        if (s.rfind("uniform(", 0) == 0 && s.back() == ')') {
            const std::string args = s.substr(8, s.size() - 9);
            const std::size_t comma = args.find(',');
            if (comma == std::string::npos) fail(field, "expected uniform(lo, hi)");
            cfg.grid.g_init = parse_value(args.substr(0, comma), Dim::none, field);
            cfg.grid.g_init_max = parse_value(args.substr(comma + 1), Dim::none, field);
        } else {
            cfg.grid.g_init = parse_value(s, Dim::none, field);
            cfg.grid.g_init_max = -1.0;
        }
    }

    void parse_extent(const std::string& value, const std::string& field) {
        const std::string s = trim(value);
        if (s == "node_pitch") cfg.grid.extent_mode = ExtentMode::node_pitch;
        else if (s == "cell_footprint") cfg.grid.extent_mode = ExtentMode::cell_footprint;
        else fail(field, "expected node_pitch or cell_footprint");
    }
};

// Bare override keys are unique across sections, so `dt=...` resolves without
// naming the section.
std::string section_of_key(const std::string& key) {
    static const std::set<std::string> grid = {"width", "height", "cell_size",
                                               "diagonal_fraction", "ohmic_fraction",
                                               "g_init", "extent_mode"};
    static const std::set<std::string> memristor = {"k_p0", "k_d0", "eta_p", "eta_d",
                                                    "g_min", "g_max"};
    static const std::set<std::string> lif = {"tau_m", "v_th", "t_p", "t_n", "a_p", "a_n",
                                              "cm_over_dt", "use_datasheet_cm_over_dt"};
    static const std::set<std::string> neurons = {"neuron", "random_count", "exclude"};
    static const std::set<std::string> inputs = {"input"};
    static const std::set<std::string> run = {"dt", "t_end", "seed"};
    static const std::set<std::string> record = {"rate_window", "snapshot_every",
                                                 "applied_voltage"};
    if (grid.count(key)) return "grid";
    if (memristor.count(key)) return "memristor";
    if (lif.count(key)) return "lif";
    if (neurons.count(key)) return "neurons";
    if (inputs.count(key)) return "inputs";
    if (run.count(key)) return "run";
    if (record.count(key)) return "record";
    fail(key, "unknown key");
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SimConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    Builder builder;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("line " + std::to_string(lineno), "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail("line " + std::to_string(lineno), "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) fail(key, "key appears before any [section]");
        builder.set(section, key, value, false);
    }

    for (const std::string& ov : overrides) {
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos) fail(ov, "override must look like key=value");
        std::string path = trim(ov.substr(0, eq));
        const std::string value = trim(ov.substr(eq + 1));
        std::string sec;
        const std::size_t dot = path.find('.');
        if (dot != std::string::npos) {
            sec = path.substr(0, dot);
            path = path.substr(dot + 1);
        } else {
            sec = section_of_key(path);
        }
        builder.set(sec, path, value, true);
    }
    return builder.cfg;
}

SimConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

std::string normalized_config(const SimConfig& c) {
    std::ostringstream out;
    out << "[grid]\n";
    out << "width = " << c.grid.width << '\n';
    out << "height = " << c.grid.height << '\n';
    out << "cell_size = " << format_full(c.grid.cell_size_um) << '\n';
    out << "diagonal_fraction = " << format_full(c.grid.diagonal_fraction) << '\n';
    out << "ohmic_fraction = " << format_full(c.grid.ohmic_fraction) << '\n';
    if (c.grid.g_init_max >= 0.0) {
        out << "g_init = uniform(" << format_full(c.grid.g_init) << ","
            << format_full(c.grid.g_init_max) << ")\n";
    } else {
        out << "g_init = " << format_full(c.grid.g_init) << '\n';
    }
    out << "extent_mode = "
        << (c.grid.extent_mode == ExtentMode::node_pitch ? "node_pitch" : "cell_footprint")
        << '\n';

    out << "\n[memristor]\n";
    out << "k_p0 = " << format_full(c.memristor.k_p0) << '\n';
    out << "k_d0 = " << format_full(c.memristor.k_d0) << '\n';
    out << "eta_p = " << format_full(c.memristor.eta_p) << '\n';
    out << "eta_d = " << format_full(c.memristor.eta_d) << '\n';
    out << "g_min = " << format_full(c.memristor.g_min) << '\n';
    out << "g_max = " << format_full(c.memristor.g_max) << '\n';

    out << "\n[lif]\n";
    out << "tau_m = " << format_full(c.lif.tau_m) << '\n';
    out << "v_th = " << format_full(c.lif.v_th) << '\n';
    out << "t_p = " << format_full(c.lif.t_p) << '\n';
    out << "t_n = " << format_full(c.lif.t_n) << '\n';
    out << "a_p = " << format_full(c.lif.a_p) << '\n';
    out << "a_n = " << format_full(c.lif.a_n) << '\n';
    out << "cm_over_dt = " << format_full(c.lif.cm_over_dt) << '\n';
    out << "use_datasheet_cm_over_dt = " << (c.use_datasheet_cm_over_dt ? "true" : "false") << '\n';

    out << "\n[neurons]\n";
    for (const NeuronPlacement& n : c.neurons) {
        out << "neuron = in (" << n.in_col << ',' << n.in_row << ") out (" << n.out_col << ','
            << n.out_row << ')';
        if (n.tau_m) out << " tau_m=" << format_full(*n.tau_m);
        if (n.v_th) out << " v_th=" << format_full(*n.v_th);
        if (n.t_p) out << " t_p=" << format_full(*n.t_p);
        if (n.t_n) out << " t_n=" << format_full(*n.t_n);
        if (n.a_p) out << " a_p=" << format_full(*n.a_p);
        if (n.a_n) out << " a_n=" << format_full(*n.a_n);
        out << '\n';
    }
    if (c.random_neuron_count > 0) {
        out << "random_count = " << c.random_neuron_count << '\n';
    }
    if (c.neuron_exclude) {
        const NodeRect& r = *c.neuron_exclude;
        out << "exclude = (" << r.col0 << ',' << r.row0 << ")..(" << r.col1 << ',' << r.row1
            << ")\n";
    }

    out << "\n[inputs]\n";
    for (const InputSpec& in : c.inputs) {
        out << "input = node (" << in.col << ',' << in.row << ") amplitude "
            << format_full(in.amplitude_v) << " start " << format_full(in.t_start_s) << " stop "
            << format_full(in.t_stop_s) << '\n';
    }

    out << "\n[run]\n";
    out << "dt = " << format_full(c.dt) << '\n';
    out << "t_end = " << format_full(c.t_end) << '\n';
    out << "seed = " << c.seed << '\n';

    out << "\n[record]\n";
    if (c.record.rate_window_s >= 0.0) {
        out << "rate_window = " << format_full(c.record.rate_window_s) << '\n';
    }
    out << "snapshot_every = " << c.record.snapshot_every_steps << '\n';
    out << "applied_voltage = " << (c.record.applied_voltage ? "true" : "false") << '\n';
    return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const char ch : bytes) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace plexsim
