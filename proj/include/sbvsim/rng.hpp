#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sbvsim {

// Gaussian sampling is hand-rolled (Box-Muller) on top of std::mt19937_64:
// the engine's output sequence is fixed by the standard, while
// std::normal_distribution is implementation-defined and would break
// bit-reproducibility of Monte Carlo runs across toolchains.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in [0, 1) using the top 53 bits of the engine.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// One draw from Normal(mean, stddev^2). stddev = 0 degenerates to the mean.
    double normal(double mean, double stddev) {
        if (!have_spare_) {
            // u1 in (0, 1] so the log is finite.
            const double u1 = 1.0 - uniform01();
            const double u2 = uniform01();
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * M_PI * u2;
            spare_ = radius * std::sin(angle);
            have_spare_ = true;
            return mean + stddev * (radius * std::cos(angle));
        }
        have_spare_ = false;
        return mean + stddev * spare_;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

namespace detail {

// splitmix64 finalizer; good avalanche for cheap stateless seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace detail

/// Per-trial seed as a pure function of the master seed and the trial index,
/// so trials can run in any order (or in parallel) with identical results.
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return detail::splitmix64(master_seed ^ detail::splitmix64(trial_index + 1));
}

} // namespace sbvsim
