#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "seqclt/orbit.hpp"

namespace seqclt {

/// Per-sample summands Y^i (i = 0..N-1) of W = sum_i Y^i, with the
/// punctured sums W^{n,m} and rings Y^{n,m} derived on demand.
class PuncturedSums {
public:
    /// Y has one row per sample and N*d columns, block i holding Y^i.
    PuncturedSums(Eigen::MatrixXd Y, std::size_t N, std::size_t d);

    /// Unit-length segments normalised by inv_sqrt; the breakpoints of
    /// `sums` must be 0, 1, ..., N.
    static PuncturedSums from_segments(const SegmentSums& sums, const Eigen::MatrixXd& inv_sqrt);

    std::size_t samples() const { return static_cast<std::size_t>(Y_.rows()); }
    std::size_t N() const { return N_; }
    std::size_t dim() const { return d_; }

    Eigen::VectorXd Y(std::size_t sample, std::size_t i) const;
    Eigen::VectorXd W(std::size_t sample) const;
    /// W minus the summands with |i - n| <= m; m = -1 gives W.
    Eigen::VectorXd W_punctured(std::size_t sample, std::size_t n, long m) const;
    /// Y^{n,m} = W^{n,m-1} - W^{n,m}, the summands with |i - n| = m.
    Eigen::VectorXd Y_ring(std::size_t sample, std::size_t n, std::size_t m) const;

private:
    Eigen::MatrixXd Y_;
    std::size_t N_;
    std::size_t d_;
};

/// f with central finite-difference gradient and Hessian at step
/// rel_step * max(1, |w|).
class FdDerivatives {
public:
    explicit FdDerivatives(std::function<double(const Eigen::VectorXd&)> f, double rel_step = 1e-3);

    double value(const Eigen::VectorXd& w) const { return f_(w); }
    Eigen::VectorXd gradient(const Eigen::VectorXd& w) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& w) const;

private:
    double step(const Eigen::VectorXd& w) const;

    std::function<double(const Eigen::VectorXd&)> f_;
    double rel_step_;
};

/// Chebyshev interpolant of a scalar function on [lo, hi].
class ChebyshevInterpolant {
public:
    ChebyshevInterpolant(const std::function<double(double)>& f, double lo, double hi, std::size_t degree);

    double operator()(double x) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    /// Largest absolute coefficient among the top eighth, a truncation proxy.
    double tail() const;

private:
    double lo_;
    double hi_;
    std::vector<double> coeffs_;
};

struct EiReport {
    std::array<double, 7> E{};
    double total = 0.0;
    double lhs = 0.0;  // mean of Laplacian f(W) - W . grad f(W)
    double residual = 0.0;  // |total - lhs|
    double mean_r = 0.0;  // sample mean of W . grad f(0) + W^T A W - tr A
    double defect = 0.0;  // gradient increments not reproduced by the Hessian quadrature
    double se = 0.0;
    double budget = 0.0;  // 3 se + |defect|
    double algebraic_gap = 0.0;  // |total - lhs - mean_r - defect|
    bool pass = false;
    std::string dominant_error;
};

/// Evaluates E_1..E_7 and mu[Laplacian f(W) - W^T grad f(W)] on the
/// empirical measure of the samples. The u-integrals use Gauss-Legendre
/// with `gl_order` nodes.
EiReport ei_decomposition(const FdDerivatives& f, const PuncturedSums& sums, unsigned threads = 1,
                          std::size_t gl_order = 8);

}  // namespace seqclt
