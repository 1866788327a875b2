#pragma once

#include <cstdint>
#include <random>

namespace seqclt {

/// Mixes (seed, stream) into an independent 64-bit seed. Used to give every
/// fixed-size work chunk its own stream so results never depend on the
/// number of workers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, m), m >= 1.
    std::uint64_t below(std::uint64_t m);

    /// Standard normal via Box-Muller; both variates of a pair are used.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Lazily generated digits of a sampled point. Orbit steps of integer-slope
/// maps consume fresh low-order digits so that long orbits stay exact.
class DigitSource {
public:
    explicit DigitSource(Rng& rng) : rng_(rng) {}

    std::uint64_t bits(int count);
    std::uint64_t below(std::uint64_t m);

private:
    Rng& rng_;
    std::uint64_t buffer_ = 0;
    int available_ = 0;
};

}  // namespace seqclt
