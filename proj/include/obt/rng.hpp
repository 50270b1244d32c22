#pragma once

#include <cstdint>
#include <random>

namespace obt {

// mt19937_64 with explicit double conversion. std::uniform_real_distribution
// is implementation-defined, so sampled problems would not be reproducible
// across standard libraries; this is.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Multiply-shift; bias is negligible for the n used here.
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace obt
