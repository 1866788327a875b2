#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqclt/grid.hpp"
#include "seqclt/observable.hpp"
#include "seqclt/schedule.hpp"

namespace seqclt {

/// Integer index range [ceil(delta1 N), ceil(delta2 N)) of a window.
struct IndexWindow {
    std::size_t first = 0;
    std::size_t last = 0;  // exclusive

    std::size_t size() const { return last > first ? last - first : 0; }
};

IndexWindow window_indices(double delta1, double delta2, std::size_t N);

/// S_N(delta1, delta2)(x) = sum over the window of phi_n(T_n ... T_1 x) by a
/// single double-precision orbit pass.
Eigen::VectorXd birkhoff_sum(const SequentialSchedule& schedule, const ObservableSequence& phis,
                             double delta1, double delta2, std::size_t N, double x);

/// Per-sample sums of phi_n o T_n over consecutive segments
/// [b_0, b_1), [b_1, b_2), ... of the index axis.
class SegmentSums {
public:
    SegmentSums(std::size_t samples, std::size_t dim, std::vector<std::size_t> breakpoints);

    std::size_t samples() const { return samples_; }
    std::size_t dim() const { return dim_; }
    std::size_t segments() const { return breakpoints_.size() - 1; }
    const std::vector<std::size_t>& breakpoints() const { return breakpoints_; }

    double* row(std::size_t sample, std::size_t segment) {
        return data_.data() + (sample * segments() + segment) * dim_;
    }
    const double* row(std::size_t sample, std::size_t segment) const {
        return data_.data() + (sample * segments() + segment) * dim_;
    }

    /// Segment range [seg_first, seg_last) covering index range [first, last);
    /// throws if either end is not a breakpoint.
    std::pair<std::size_t, std::size_t> segment_range(std::size_t first, std::size_t last) const;

    /// Sum over segments [seg_first, seg_last) for one sample.
    void window_sum(std::size_t sample, std::size_t seg_first, std::size_t seg_last, double* out) const;

    /// Row-major samples x dim matrix of window sums.
    Eigen::MatrixXd window_matrix(std::size_t first, std::size_t last) const;

private:
    std::size_t samples_;
    std::size_t dim_;
    std::vector<std::size_t> breakpoints_;
    std::vector<double> data_;
};

struct SimulationOptions {
    unsigned threads = 1;
};

/// Monte-Carlo orbits from mu in 64-bit fixed point. Integer-slope maps are
/// advanced exactly by consuming fresh random low digits, so long orbits do
/// not collapse onto the floating-point fixed point 0.
SegmentSums simulate_segments(const SequentialSchedule& schedule, const ObservableSequence& phis,
                              const GridDensity& mu, std::vector<std::size_t> breakpoints,
                              std::size_t M, std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace seqclt
