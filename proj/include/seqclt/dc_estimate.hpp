#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqclt/convex.hpp"

namespace seqclt {

struct FamilySpec {
    std::size_t halfspaces = 256;
    std::size_t directions = 64;
    std::vector<double> quantiles{0.1, 0.3, 0.5, 0.7};
    std::size_t balls = 64;
    double ball_center_range = 1.0;
    double ball_r_min = 0.5;
    double ball_r_max = 2.5;
    std::size_t boxes = 32;
    std::uint64_t seed = 1;
};

/// Finite surrogate for the class of convex sets, with cached Gaussian
/// measures.
class ConvexFamily {
public:
    explicit ConvexFamily(std::vector<ConvexSet> sets);

    /// Half-spaces along fixed directions with offsets at quantiles of the
    /// projected samples (standard normal quantiles without samples), random
    /// half-spaces up to the requested count, then balls and boxes.
    static ConvexFamily generate(const FamilySpec& spec, std::size_t d,
                                 const Eigen::MatrixXd* samples = nullptr);

    std::size_t size() const { return sets_.size(); }
    std::size_t dim() const { return sets_.front().dim(); }
    const ConvexSet& set(std::size_t i) const { return sets_[i]; }
    const std::vector<ConvexSet>& sets() const { return sets_; }
    double gaussian(std::size_t i) const { return gaussian_[i]; }

private:
    std::vector<ConvexSet> sets_;
    std::vector<double> gaussian_;
};

/// Unit vectors used for the quantile half-spaces: +-1 for d = 1, equally
/// spaced angles for d = 2, a Fibonacci lattice for d = 3 and seeded random
/// directions above.
std::vector<Eigen::VectorXd> direction_set(std::size_t d, std::size_t count, std::uint64_t seed);

struct EmpiricalMeasure {
    double p = 0.0;
    double se = 0.0;
};

/// Fraction of rows of `samples` inside C with its binomial standard error.
EmpiricalMeasure empirical_measure(const Eigen::MatrixXd& samples, const ConvexSet& C);

struct DcRow {
    std::string shape;
    std::string params;
    std::uint64_t params_hash = 0;
    double empirical = 0.0;
    double gaussian = 0.0;
    double diff = 0.0;
    double se = 0.0;
};

/// Lower estimate of d_c: the largest discrepancy over the family.
struct DcEstimate {
    double value = 0.0;
    double se = 0.0;  // standard error of the argmax row
    double max_se = 0.0;
    std::size_t argmax = 0;
    std::vector<DcRow> rows;
};

DcEstimate dc_estimate(const Eigen::MatrixXd& samples, const ConvexFamily& family, unsigned threads = 1);

std::uint64_t fnv1a(const std::string& text);

struct ShellRow {
    std::string shape;
    std::string params;
    double outer = 0.0;  // N_d(C^eps \ C)
    double outer_se = 0.0;
    double inner = 0.0;  // N_d(C \ C^{-eps})
    double inner_se = 0.0;
    std::optional<double> outer_exact;  // half-spaces and balls
    double bound = 0.0;
    bool pass = false;
};

struct ShellReport {
    double eps = 0.0;
    std::size_t mc_points = 0;
    double bound = 0.0;
    std::vector<ShellRow> rows;
    std::size_t failed = 0;
    bool pass() const { return failed == 0; }
};

/// Monte-Carlo shell masses under N_d against 4 d^{1/4} eps + 3 se.
ShellReport shell_bound_check(const ConvexFamily& family, double eps, std::size_t mc_points,
                              std::uint64_t seed, unsigned threads = 1);

struct SmoothingBoundReport {
    double eps = 0.0;
    double dc = 0.0;
    double shell_term = 0.0;  // 4 d^{1/4} eps
    double max_smooth_diff = 0.0;  // max over C and C^{-eps} of |mean h - N_d[h]|
    double se = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// Checks d_c <= 4 d^{1/4} eps + max |mean h - N_d[h]| + 3 se over the
/// family, using both h_{C,eps} and h_{C^{-eps},eps}.
SmoothingBoundReport smoothing_bound_check(const Eigen::MatrixXd& samples, const ConvexFamily& family,
                                           double eps, unsigned threads = 1);

}  // namespace seqclt
