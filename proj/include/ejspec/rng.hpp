#pragma once

#include <cmath>
#include <cstdint>

namespace ejspec {

// Deterministic splitmix64 generator.  Used instead of <random> engines so
// that sampled values are identical across standard-library implementations,
// which keeps golden outputs stable.  Streams derived with derive() are
// independent of draw order, so per-sample work can be parallelized without
// changing results.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; never returns zero.
    double uniform01_open_low() { return 1.0 - uniform01(); }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform01_open_low();
        double v = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u));
        double angle = 6.283185307179586476925286766559 * v;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    // Independent stream for the given counter; draw order across streams
    // does not matter.
    SplitMix64 derive(std::uint64_t counter) const {
        SplitMix64 mix(state_ ^ (0xD1B54A32D192ED03ULL * (counter + 1)));
        mix.next_u64();
        return mix;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ejspec
