#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqclt/grid.hpp"
#include "seqclt/rng.hpp"

namespace seqclt {

inline constexpr std::size_t kChunkSize = 1024;

/// Inverse-CDF sampler for a grid density: the density is linear on each
/// cell, so the CDF is piecewise quadratic and inverted in closed form.
class InverseCdfSampler {
public:
    explicit InverseCdfSampler(const GridDensity& mu);

    double quantile(double u) const;
    /// Fixed-point sample; uniform densities use all 64 random bits.
    std::uint64_t sample_bits(Rng& rng, DigitSource& digits) const;
    double cdf(double x) const;
    bool is_uniform() const { return uniform_; }

private:
    std::vector<double> values_;
    std::vector<double> cumulative_;
    bool uniform_ = false;
};

/// M points from mu, chunked into independent seeded streams so the output
/// does not depend on the number of workers.
std::vector<double> sample_mu(const GridDensity& mu, std::size_t M, std::uint64_t seed,
                              unsigned threads = 1);

/// Kolmogorov-Smirnov statistic of points against the CDF of mu.
double ks_statistic(std::vector<double> points, const GridDensity& mu);

}  // namespace seqclt
