#pragma once

#include <cstdint>
#include <random>

namespace dice {

/**
 * Seedable normal generator used for every random draw in the toolkit.
 *
 * Engine: std::mt19937_64 (bit-exact across standard libraries) seeded with
 * splitmix64(seed). Uniforms take the top 53 bits of one engine output;
 * normals use the Marsaglia polar method, caching the second variate.
 * std::normal_distribution is deliberately not used because its algorithm
 * is library-specific.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Trials are spaced 2^32 seeds apart so machine streams (trial seed + m) never collide.
inline constexpr std::uint64_t kTrialSeedStride = std::uint64_t{1} << 32;

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) {
    return base_seed + trial * kTrialSeedStride;
}

inline std::uint64_t machine_seed(std::uint64_t trial_seed, std::uint64_t machine_id) {
    return trial_seed + machine_id;
}

} // namespace dice
