#pragma once

#include <cstdint>
#include <random>

namespace plexsim {

/// SplitMix64 step (Steele/Lea/Flood). Used only to derive independent,
/// well-mixed stream seeds from the single run seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Named substreams of the run seed. Each consumer draws from its own stream
/// so adding draws in one place never shifts the numbers seen by another.
enum class RngStream : std::uint64_t {
    diagonals = 1,
    ohmic_edges = 2,
    initial_conductance = 3,
    neuron_layout = 4,
};

/// Deterministic uniform generator: one mt19937_64 per (seed, stream), with
/// hand-rolled value mapping. The engine's output sequence is fixed by the
/// standard; avoiding std::*_distribution keeps draws identical across
/// standard libraries.
class Rng {
public:
    Rng(std::uint64_t seed, RngStream stream) {
        std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(stream));
        engine_.seed(splitmix64(state));
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Rejection sampling, bias-free.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= threshold) return x % n;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace plexsim
