#include "seqclt/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "seqclt/errors.hpp"
#include "seqclt/maps.hpp"
#include "seqclt/parallel.hpp"

namespace seqclt {

InverseCdfSampler::InverseCdfSampler(const GridDensity& mu) : values_(mu.function().values()) {
    const std::size_t G = values_.size() - 1;
    cumulative_.assign(G + 1, 0.0);
    for (std::size_t i = 0; i < G; ++i) {
        cumulative_[i + 1] = cumulative_[i] + 0.5 * (values_[i] + values_[i + 1]) / static_cast<double>(G);
    }
    const double total = cumulative_.back();
    if (!(total > 0.0)) {
        throw DomainError("cannot sample from a degenerate density");
    }
    for (double& c : cumulative_) {
        c /= total;
    }
    for (double& v : values_) {
        v /= total;
    }
    uniform_ = std::all_of(values_.begin(), values_.end(),
                           [&](double v) { return v == values_.front(); });
}

double InverseCdfSampler::quantile(double u) const {
    const std::size_t G = values_.size() - 1;
    const double h = 1.0 / static_cast<double>(G);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t i = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    i = std::min(i, G - 1);
    // Within the cell the density is a + b t (t in [0, h]); solve
    // a t + b t^2 / 2 = u - C_i.
    const double a = values_[i];
    const double b = (values_[i + 1] - values_[i]) / h;
    const double r = std::max(0.0, u - cumulative_[i]);
    double t;
    if (std::abs(b) * h < 1e-12 * std::max(a, 1e-300)) {
        t = a > 0.0 ? r / a : 0.0;
    } else {
        const double disc = std::max(0.0, a * a + 2.0 * b * r);
        t = 2.0 * r / (a + std::sqrt(disc));
    }
    return std::clamp(static_cast<double>(i) * h + std::clamp(t, 0.0, h), 0.0, 1.0);
}

double InverseCdfSampler::cdf(double x) const {
    const std::size_t G = values_.size() - 1;
    const double h = 1.0 / static_cast<double>(G);
    x = std::clamp(x, 0.0, 1.0);
    const std::size_t i = std::min(static_cast<std::size_t>(x * static_cast<double>(G)), G - 1);
    const double t = x - static_cast<double>(i) * h;
    const double b = (values_[i + 1] - values_[i]) / h;
    return cumulative_[i] + values_[i] * t + 0.5 * b * t * t;
}

std::uint64_t InverseCdfSampler::sample_bits(Rng& rng, DigitSource& digits) const {
    if (uniform_) {
        return rng.next();
    }
    return from_unit(quantile(rng.uniform()), digits);
}

std::vector<double> sample_mu(const GridDensity& mu, std::size_t M, std::uint64_t seed,
                              unsigned threads) {
    if (M == 0) {
        throw DomainError("sample count must be positive");
    }
    const InverseCdfSampler sampler(mu);
    std::vector<double> out(M);
    const std::size_t chunks = (M + kChunkSize - 1) / kChunkSize;
    parallel_chunks(chunks, threads, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        DigitSource digits(rng);
        const std::size_t end = std::min(M, (c + 1) * kChunkSize);
        for (std::size_t i = c * kChunkSize; i < end; ++i) {
            out[i] = to_unit(sampler.sample_bits(rng, digits));
        }
    });
    return out;
}

double ks_statistic(std::vector<double> points, const GridDensity& mu) {
    if (points.empty()) {
        throw DomainError("KS statistic of an empty sample");
    }
    const InverseCdfSampler sampler(mu);
    std::sort(points.begin(), points.end());
    const double M = static_cast<double>(points.size());
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double F = sampler.cdf(points[i]);
        d = std::max({d, static_cast<double>(i + 1) / M - F, F - static_cast<double>(i) / M});
    }
    return d;
}

}  // namespace seqclt
