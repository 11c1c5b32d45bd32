#pragma once
// Seeded PRNG streams. One stream per path keeps ensembles reproducible and
// mergeable in stream order no matter how the work is scheduled.

#include <cmath>
#include <cstdint>
#include <random>

#include "kpz/common.hpp"

namespace kpz {

class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) {
        std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                          static_cast<uint32_t>(stream),
                          static_cast<uint32_t>(stream >> 32)};
        eng_.seed(seq);
    }

    // Uniform on (0,1): 53-bit mantissa offset by half an ulp, so neither
    // endpoint is reachable and log/inverse-CDF calls never see 0 or 1.
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal, Box-Muller with the second leg cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double th = 2.0 * M_PI * uniform();
        cached_ = r * std::sin(th);
        have_cached_ = true;
        return r * std::cos(th);
    }

    // Gamma(alpha, 1) by Marsaglia-Tsang; alpha < 1 lifts through the
    // u^{1/alpha} boost on a draw at alpha + 1.
    double gamma(double alpha) {
        require(alpha > 0.0 && std::isfinite(alpha), "Rng::gamma: alpha must be positive");
        if (alpha < 1.0) {
            const double u = uniform();
            return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double cc = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z, v;
            do {
                z = normal();
                v = 1.0 + cc * z;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
            if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::mt19937_64 eng_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace kpz
