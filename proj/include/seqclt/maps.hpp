#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "seqclt/rng.hpp"

namespace seqclt {

/// One monotone branch mapping [left, right] onto [0, 1].
struct BranchSpec {
    double left = 0.0;
    double right = 1.0;
    std::function<double(double)> forward;
    std::function<double(double)> derivative;
    std::function<double(double)> second_derivative;  // optional
    std::function<double(double)> inverse;            // optional closed form
};

struct PreImage {
    std::size_t branch = 0;
    double x = 0.0;
    double abs_derivative = 0.0;
};

class PiecewiseExpandingMap {
public:
    /// `integer_slope` > 0 declares the map to be x -> m x mod 1, which lets
    /// orbit simulation run in exact fixed point.
    PiecewiseExpandingMap(std::string label, std::vector<BranchSpec> branches,
                          int integer_slope = 0, int grid_per_branch = 4096);

    const std::string& label() const { return label_; }
    std::size_t branch_count() const { return branches_.size(); }
    std::vector<double> branch_endpoints() const;
    bool increasing(std::size_t b) const { return increasing_[b]; }

    /// Branch owning x; left endpoints are owned, x = 1 is identified with 0.
    std::size_t branch_of(double x) const;
    double eval(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    double branch_forward(std::size_t b, double x) const;
    double branch_derivative(std::size_t b, double x) const;
    /// Preimage of y in [0, 1] on the closed branch b.
    double branch_inverse(std::size_t b, double y) const;
    std::vector<PreImage> inverse_branches(double y) const;

    /// Grid infimum of |T'|.
    double min_slope() const { return min_slope_; }
    /// Grid supremum of |T''| / T'^2.
    double distortion_bound() const { return distortion_; }
    int grid_per_branch() const { return grid_per_branch_; }
    int integer_slope() const { return integer_slope_; }

    /// One orbit step on a 64-bit fixed-point state x = bits / 2^64.
    std::uint64_t step_bits(std::uint64_t bits, DigitSource& digits) const;

private:
    double branch_second(std::size_t b, double x) const;

    std::string label_;
    std::vector<BranchSpec> branches_;
    std::vector<bool> increasing_;
    int integer_slope_ = 0;
    int grid_per_branch_ = 4096;
    double min_slope_ = 0.0;
    double distortion_ = 0.0;
};

using MapPtr = std::shared_ptr<const PiecewiseExpandingMap>;

double eval_map(const PiecewiseExpandingMap& map, double x);
std::vector<PreImage> inverse_branches(const PiecewiseExpandingMap& map, double y);

/// x -> m x mod 1.
MapPtr make_affine(int m, std::string label = {});
/// x -> 2x + c sin(2 pi x) mod 1, |c| < 1/pi.
MapPtr make_perturbed(double c, std::string label = {});
/// Single-branch circle map x -> x + c sin(2 pi x) / (2 pi), |c| < 1. Its
/// slope drops below one, so it violates uniform expansion on purpose.
MapPtr make_circle_diffeo(double c, std::string label = {});

double to_unit(std::uint64_t bits);
std::uint64_t from_unit(double x, DigitSource& digits);

}  // namespace seqclt
