#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cfisac {

/// Deterministic RNG stream. Wraps mt19937_64 but implements the
/// distributions by hand so that draws are bit-reproducible across standard
/// library implementations.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return (engine_() >> 11) * (1.0 / 9007199254740992.0);  // 2^53
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    uint64_t integer() { return engine_(); }

    /// Derives an independent stream for a named sub-task.
    RngStream fork(uint64_t stream_id) {
        return RngStream(engine_() ^ (0x9E3779B97F4A7C15ull * (stream_id + 1)));
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cfisac
