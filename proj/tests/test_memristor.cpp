#include <doctest.h>

#include <cmath>

#include "plexsim/memristor.hpp"
#include "plexsim/rng.hpp"
#include "support/euler_oracle.hpp"

using namespace plexsim;

namespace {

// Voltage where potentiation and depression balance, found by bisection on
// k_p(V) - k_d(V) without using the closed form.
double bisect_balance_voltage(const MemristorParams& p) {
    double lo = 0.0;
    double hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto [k_p, k_d] = rate_coefficients(mid, p);
        (k_p < k_d ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("rate coefficients at rest equal the fitted constants") {
    const MemristorParams p;
    const auto [k_p, k_d] = rate_coefficients(0.0, p);
    CHECK(k_p == doctest::Approx(2.56e-6).epsilon(1e-12));
    CHECK(k_d == doctest::Approx(64.90).epsilon(1e-12));
}

TEST_CASE("rates depend on the absolute voltage only") {
    const MemristorParams p;
    const auto pos = rate_coefficients(2.0, p);
    const auto neg = rate_coefficients(-2.0, p);
    CHECK(pos.k_p == neg.k_p);
    CHECK(pos.k_d == neg.k_d);
    CHECK(pos.k_p > 0.0);
    CHECK(pos.k_d > 0.0);
}

TEST_CASE("rate-balance voltage matches an independent bisection") {
    const MemristorParams p;
    const double v_star = std::log(p.k_d0 / p.k_p0) / (p.eta_p + p.eta_d);
    CHECK(v_star == doctest::Approx(0.4211).epsilon(5e-4));
    CHECK(std::abs(v_star - bisect_balance_voltage(p)) < 1e-6);
    CHECK(steady_state(v_star, p) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("steady state at rest is nearly pristine") {
    const MemristorParams p;
    const double expected = p.k_p0 / (p.k_p0 + p.k_d0);
    CHECK(steady_state(0.0, p) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(steady_state(0.0, p) == doctest::Approx(3.94e-8).epsilon(1e-2));
}

TEST_CASE("steady state increases strictly with |V|") {
    const MemristorParams p;
    // beyond ~1.2 V the attractor saturates to 1 at double precision
    double prev = steady_state(0.0, p);
    for (double v = 0.05; v <= 1.0; v += 0.05) {
        const double cur = steady_state(v, p);
        CHECK(cur > prev);
        CHECK(cur < 1.0);
        prev = cur;
    }
}

TEST_CASE("attractor is a fixed point and the large-dt limit") {
    const MemristorParams p;
    const double g_inf = steady_state(0.8, p);
    CHECK(update_conductance(g_inf, 0.8, 1e-4, p) == doctest::Approx(g_inf).epsilon(1e-14));
    // theta*dt >> 1 forgets the initial state entirely
    for (double g0 : {0.0, 0.3, 1.0}) {
        CHECK(update_conductance(g0, 0.8, 1e3, p) == doctest::Approx(g_inf).epsilon(1e-12));
    }
}

TEST_CASE("update lands between the state and the attractor") {
    const MemristorParams p;
    Rng rng(99, RngStream::initial_conductance);
    for (int i = 0; i < 200; ++i) {
        const double g = rng.uniform01();
        const double v = rng.uniform(0.0, 1.0);
        const double dt = std::pow(10.0, rng.uniform(-5.0, -2.0));
        const double g_inf = steady_state(v, p);
        const double g1 = update_conductance(g, v, dt, p);
        CHECK(g1 >= std::min(g, g_inf) - 1e-15);
        CHECK(g1 <= std::max(g, g_inf) + 1e-15);
        // monotone approach: the step never overshoots or reverses
        if (g != g_inf) {
            CHECK(std::signbit(g1 - g) == std::signbit(g_inf - g));
        }
    }
}

TEST_CASE("closed form matches the projected Euler oracle") {
    const MemristorParams p;
    // The frozen pointwise case: pristine edge under a strong pulse.
    {
        const double closed = update_conductance(0.0, 1.2, 1e-4, p);
        const double euler = testing::euler_conductance(0.0, 1.2, 1e-4, 10000, p);
        CHECK(std::abs(closed - euler) / euler < 1e-6);
    }
    // Random triples inside the envelope where Euler at dt/1e4 substeps can
    // itself resolve 1e-6 (truncation ~(theta*dt)^2/2e4); larger voltages are
    // covered by the projected case above.
    Rng rng(7, RngStream::initial_conductance);
    for (int i = 0; i < 50; ++i) {
        const double g0 = rng.uniform01();
        double v;
        double dt;
        do {
            v = rng.uniform(0.0, 0.6);
            dt = std::pow(10.0, rng.uniform(-5.0, -3.0));
            const auto [k_p, k_d] = rate_coefficients(v, p);
            if ((k_p + k_d) * dt <= 0.03) break;
        } while (true);
        const double closed = update_conductance(g0, v, dt, p);
        const double euler = testing::euler_conductance(g0, v, dt, 10000, p);
        CHECK(std::abs(closed - euler) / std::max(euler, 1e-30) < 1e-6);
    }
}

TEST_CASE("two half steps compose into one full step") {
    const MemristorParams p;
    Rng rng(21, RngStream::initial_conductance);
    for (int i = 0; i < 100; ++i) {
        const double g0 = rng.uniform01();
        const double v = rng.uniform(0.0, 1.5);
        const double dt1 = std::pow(10.0, rng.uniform(-6.0, -3.0));
        const double dt2 = std::pow(10.0, rng.uniform(-6.0, -3.0));
        const double two_step = update_conductance(update_conductance(g0, v, dt1, p), v, dt2, p);
        const double one_step = update_conductance(g0, v, dt1 + dt2, p);
        CHECK(two_step == doctest::Approx(one_step).epsilon(1e-12));
    }
}

TEST_CASE("conductance stays confined under arbitrary drive") {
    const MemristorParams p;
    Rng rng(5, RngStream::initial_conductance);
    double g = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double v = rng.uniform(-3.0, 3.0);
        g = update_conductance(g, v, 1e-4, p);
        REQUIRE(g >= 0.0);
        REQUIRE(g <= 1.0);
    }
}

TEST_CASE("Ohm mapping interpolates between the bounds") {
    const MemristorParams p;
    CHECK(effective_conductance(0.0, p) == doctest::Approx(1e-12));
    CHECK(effective_conductance(1.0, p) == doctest::Approx(200e-12));
    CHECK(effective_conductance(0.5, p) == doctest::Approx(100.5e-12));
}

TEST_CASE("Ohmic edges never move") {
    const ExponentialRateModel model{MemristorParams{}};
    EdgeState edge;
    edge.ohmic = true;
    for (int i = 0; i < 10; ++i) step_edge(edge, 1.5, 1e-4, model);
    CHECK(edge.g == 0.0);
    CHECK(model.conductance(edge.g) == doctest::Approx(1e-12));
}

TEST_CASE("argument errors") {
    const MemristorParams p;
    CHECK_THROWS_AS((void)update_conductance(0.5, 1.0, 0.0, p), std::invalid_argument);
    CHECK_THROWS_AS((void)update_conductance(1.5, 1.0, 1e-4, p), std::domain_error);
    CHECK_THROWS_AS((void)update_conductance(-0.1, 1.0, 1e-4, p), std::domain_error);
    CHECK_THROWS_AS((void)effective_conductance(1.01, p), std::domain_error);
    CHECK_THROWS_AS((void)rate_coefficients(std::nan(""), p), std::invalid_argument);
    MemristorParams bad;
    bad.g_min = 5e-10;  // above g_max
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
