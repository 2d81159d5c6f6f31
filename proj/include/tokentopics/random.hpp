#pragma once

#include <cstdint>
#include <random>

namespace tokentopics {

// Seeded generator with distribution helpers that do not depend on the
// standard library's implementation-defined distributions, so results are
// reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        const auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace tokentopics
