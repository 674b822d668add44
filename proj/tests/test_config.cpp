#include <doctest.h>

#include <string>

#include "plexsim/config.hpp"
#include "plexsim/errors.hpp"

using namespace plexsim;

namespace {

const char* kSample = R"(# sample scenario
[grid]
width = 6
height = 5
cell_size = 25um
diagonal_fraction = 0.25
ohmic_fraction = 0.1
g_init = 0.001

[memristor]
g_min = 1pS
g_max = 200pS

[lif]
tau_m = 1ms
v_th = 0.5V
a_n = -100mV

[neurons]
neuron = in (1,0) out (1,1)
neuron = in (3,2) out (4,2) tau_m=2ms v_th=0.45V

[inputs]
input = node (0,0) amplitude 1.5V start 0ms stop 1ms

[run]
dt = 0.1ms
t_end = 10ms
seed = 42

[record]
rate_window = 5ms
snapshot_every = 10
)";

}  // namespace

TEST_CASE("unit suffixes normalize to SI") {
    const SimConfig cfg = parse_config(kSample);
    CHECK(cfg.grid.cell_size_um == doctest::Approx(25.0));
    CHECK(cfg.memristor.g_min == doctest::Approx(1e-12));
    CHECK(cfg.memristor.g_max == doctest::Approx(200e-12));
    CHECK(cfg.lif.tau_m == doctest::Approx(1e-3));
    CHECK(cfg.lif.a_n == doctest::Approx(-0.1));
    CHECK(cfg.dt == doctest::Approx(1e-4));
    CHECK(cfg.t_end == doctest::Approx(1e-2));
    CHECK(cfg.seed == 42);
    CHECK(cfg.record.rate_window_s == doctest::Approx(5e-3));
    REQUIRE(cfg.neurons.size() == 2);
    CHECK(cfg.neurons[1].tau_m.value() == doctest::Approx(2e-3));
    CHECK(cfg.neurons[1].v_th.value() == doctest::Approx(0.45));
    CHECK_FALSE(cfg.neurons[0].tau_m.has_value());
    REQUIRE(cfg.inputs.size() == 1);
    CHECK(cfg.inputs[0].amplitude_v == doctest::Approx(1.5));
    CHECK(cfg.inputs[0].t_stop_s == doctest::Approx(1e-3));
}

TEST_CASE("unknown keys and sections are rejected, naming the field") {
    try {
        (void)parse_config("[grid]\nwidht = 5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "grid.widht");
    }
    CHECK_THROWS_AS((void)parse_config("[grids]\nwidth = 5\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("width = 5\n"), ConfigError);  // before any section
    CHECK_THROWS_AS((void)parse_config("[run]\ndt = 0.1ms\ndt = 0.2ms\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[run]\ndt = 0.1qs\n"), ConfigError);   // bad suffix
    CHECK_THROWS_AS((void)parse_config("[run]\nseed = -3\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[grid]\nwidth = 5V\n"), ConfigError);  // suffix on plain
}

TEST_CASE("overrides replace file values and accept bare keys") {
    const SimConfig cfg = parse_config(kSample, {"dt=0.2ms", "grid.width=9", "seed=7"});
    CHECK(cfg.dt == doctest::Approx(2e-4));
    CHECK(cfg.grid.width == 9);
    CHECK(cfg.seed == 7);
    CHECK_THROWS_AS((void)parse_config(kSample, {"neuron=in (0,0) out (0,1)"}), ConfigError);
    CHECK_THROWS_AS((void)parse_config(kSample, {"nonsense=1"}), ConfigError);
    CHECK_THROWS_AS((void)parse_config(kSample, {"dt"}), ConfigError);
}

TEST_CASE("normalized echo re-parses to an identical echo") {
    const SimConfig cfg = parse_config(kSample);
    const std::string echo = normalized_config(cfg);
    const SimConfig reparsed = parse_config(echo);
    CHECK(normalized_config(reparsed) == echo);
    // normalization resolves units: the echo is plain SI
    CHECK(echo.find("ms") == std::string::npos);
    CHECK(echo.find("dt = 0.0001") != std::string::npos);
}

TEST_CASE("random g_init range round-trips") {
    const SimConfig cfg = parse_config("[grid]\ng_init = uniform(0.01, 0.05)\n");
    CHECK(cfg.grid.g_init == doctest::Approx(0.01));
    CHECK(cfg.grid.g_init_max == doctest::Approx(0.05));
    const SimConfig reparsed = parse_config(normalized_config(cfg));
    CHECK(reparsed.grid.g_init_max == doctest::Approx(0.05));
}

TEST_CASE("exclusion rectangles and random counts parse") {
    const SimConfig cfg = parse_config(
        "[neurons]\nrandom_count = 12\nexclude = (2,2)..(6,7)\n");
    CHECK(cfg.random_neuron_count == 12);
    REQUIRE(cfg.neuron_exclude.has_value());
    CHECK(cfg.neuron_exclude->col0 == 2);
    CHECK(cfg.neuron_exclude->row1 == 7);
}

TEST_CASE("config fingerprint is stable and content-sensitive") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64(kSample) == fnv1a64(kSample));
    CHECK(fnv1a64("[run]\n") != fnv1a64("[run] \n"));
}

TEST_CASE("malformed structural lines are rejected") {
    CHECK_THROWS_AS((void)parse_config("[grid\nwidth = 5\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[grid]\nwidth 5\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[neurons]\nneuron = in (1,1)\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[neurons]\nneuron = in (1,1) out (2;2)\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[inputs]\ninput = node (0,0) amplitude 1V\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config("[record]\napplied_voltage = yes\n"), ConfigError);
}
