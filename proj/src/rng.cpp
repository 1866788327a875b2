#include "seqclt/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace seqclt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::below(std::uint64_t m) {
    // Lemire's multiply-shift; bias is at most m / 2^64.
    const unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * m;
    return static_cast<std::uint64_t>(product >> 64);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t DigitSource::bits(int count) {
    if (count <= 0) {
        return 0;
    }
    if (count >= 64) {
        return rng_.next();
    }
    if (available_ < count) {
        buffer_ = rng_.next();
        available_ = 64;
    }
    const std::uint64_t out = buffer_ & ((std::uint64_t{1} << count) - 1);
    buffer_ >>= count;
    available_ -= count;
    return out;
}

std::uint64_t DigitSource::below(std::uint64_t m) {
    if (m <= 1) {
        return 0;
    }
    if ((m & (m - 1)) == 0) {
        return bits(std::countr_zero(m));
    }
    return rng_.below(m);
}

}  // namespace seqclt
