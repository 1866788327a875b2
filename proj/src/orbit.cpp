#include "seqclt/orbit.hpp"

#include <algorithm>
#include <cmath>

#include "seqclt/errors.hpp"
#include "seqclt/maps.hpp"
#include "seqclt/parallel.hpp"
#include "seqclt/rng.hpp"
#include "seqclt/sampling.hpp"

namespace seqclt {

IndexWindow window_indices(double delta1, double delta2, std::size_t N) {
    if (!(0.0 <= delta1 && delta1 <= delta2 && delta2 <= 1.0)) {
        throw DomainError("window needs 0 <= delta1 <= delta2 <= 1");
    }
    const double Nd = static_cast<double>(N);
    return {static_cast<std::size_t>(std::ceil(delta1 * Nd)),
            static_cast<std::size_t>(std::ceil(delta2 * Nd))};
}

Eigen::VectorXd birkhoff_sum(const SequentialSchedule& schedule, const ObservableSequence& phis,
                             double delta1, double delta2, std::size_t N, double x) {
    const auto w = window_indices(delta1, delta2, N);
    const std::size_t d = phis.phi.dim();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (std::size_t n = 0; n < w.last; ++n) {
        if (n > 0) {
            x = schedule.map_at(n).eval(x);
        }
        if (n >= w.first) {
            phis.eval(n, x, v.data());
            sum += v;
        }
    }
    return sum;
}

SegmentSums::SegmentSums(std::size_t samples, std::size_t dim, std::vector<std::size_t> breakpoints)
    : samples_(samples), dim_(dim), breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2 || !std::is_sorted(breakpoints_.begin(), breakpoints_.end())) {
        throw DomainError("segment breakpoints must be sorted with at least two entries");
    }
    data_.assign(samples_ * segments() * dim_, 0.0);
}

std::pair<std::size_t, std::size_t> SegmentSums::segment_range(std::size_t first, std::size_t last) const {
    const auto a = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), first);
    const auto b = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), last);
    if (a == breakpoints_.end() || *a != first || b == breakpoints_.end() || *b != last) {
        throw DomainError("window [" + std::to_string(first) + "," + std::to_string(last) +
                          ") does not align with the simulated segments");
    }
    return {static_cast<std::size_t>(a - breakpoints_.begin()),
            static_cast<std::size_t>(b - breakpoints_.begin())};
}

void SegmentSums::window_sum(std::size_t sample, std::size_t seg_first, std::size_t seg_last,
                             double* out) const {
    std::fill(out, out + dim_, 0.0);
    for (std::size_t s = seg_first; s < seg_last; ++s) {
        const double* r = row(sample, s);
        for (std::size_t k = 0; k < dim_; ++k) {
            out[k] += r[k];
        }
    }
}

Eigen::MatrixXd SegmentSums::window_matrix(std::size_t first, std::size_t last) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(samples_), static_cast<Eigen::Index>(dim_));
    if (first >= last) {
        out.setZero();
        return out;
    }
    const auto [sa, sb] = segment_range(first, last);
    std::vector<double> buf(dim_);
    for (std::size_t i = 0; i < samples_; ++i) {
        window_sum(i, sa, sb, buf.data());
        for (std::size_t k = 0; k < dim_; ++k) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = buf[k];
        }
    }
    return out;
}

SegmentSums simulate_segments(const SequentialSchedule& schedule, const ObservableSequence& phis,
                              const GridDensity& mu, std::vector<std::size_t> breakpoints,
                              std::size_t M, std::uint64_t seed, const SimulationOptions& options) {
    if (M == 0) {
        throw DomainError("sample count must be positive");
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    SegmentSums sums(M, phis.phi.dim(), breakpoints);
    const std::size_t horizon = sums.breakpoints().back();
    if (phis.length() < horizon) {
        throw DomainError("observable sequence shorter than the simulated horizon");
    }
    std::vector<const PiecewiseExpandingMap*> maps(horizon, nullptr);
    for (std::size_t n = 1; n < horizon; ++n) {
        maps[n] = &schedule.map_at(n);
    }
    const InverseCdfSampler sampler(mu);
    const std::size_t d = phis.phi.dim();
    const std::size_t first_bp = sums.breakpoints().front();
    const std::size_t chunks = (M + kChunkSize - 1) / kChunkSize;

    parallel_chunks(chunks, options.threads, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        DigitSource digits(rng);
        std::vector<double> v(d);
        const std::size_t end = std::min(M, (c + 1) * kChunkSize);
        for (std::size_t i = c * kChunkSize; i < end; ++i) {
            std::uint64_t bits = sampler.sample_bits(rng, digits);
            std::size_t seg = 0;
            double* acc = sums.row(i, 0);
            for (std::size_t n = 0; n < horizon; ++n) {
                if (n > 0) {
                    bits = maps[n]->step_bits(bits, digits);
                }
                if (n < first_bp) {
                    continue;
                }
                while (n >= sums.breakpoints()[seg + 1]) {
                    ++seg;
                    acc = sums.row(i, seg);
                }
                phis.eval(n, to_unit(bits), v.data());
                for (std::size_t k = 0; k < d; ++k) {
                    acc[k] += v[k];
                }
            }
        }
    });
    return sums;
}

}  // namespace seqclt
