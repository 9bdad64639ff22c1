#pragma once

#include <cstdint>
#include <random>

namespace cst {

// Thin wrapper over mt19937_64. The standard distributions are
// implementation-defined, so all transforms are written out here to keep
// draws identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller (one value per call, the pair partner is dropped).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace cst
