#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace seqclt {

/// Real function sampled at the G + 1 nodes i / G of [0, 1].
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::size_t intervals, double alpha = 1.0);
    explicit GridFunction(std::vector<double> values, double alpha = 1.0);

    static GridFunction from(const std::function<double(double)>& f, std::size_t intervals,
                             double alpha = 1.0);

    std::size_t intervals() const { return values_.empty() ? 0 : values_.size() - 1; }
    double node(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(intervals()); }
    double alpha() const { return alpha_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    /// Linear interpolation.
    double operator()(double x) const;
    /// Four-point cubic interpolation clamped to the range of the two
    /// bracketing nodes; keeps nonnegative data nonnegative.
    double cubic(double x) const;

    /// Trapezoid rule.
    double integral() const;
    double sup_norm() const;
    double min() const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double s);
    /// Pointwise product.
    GridFunction& multiply(const GridFunction& o);

private:
    std::vector<double> values_;
    double alpha_ = 1.0;
};

/// Trapezoid integral of the pointwise product.
double inner(const GridFunction& a, const GridFunction& b);

/// Probability density on the grid: nonnegative with unit trapezoid mass.
class GridDensity {
public:
    explicit GridDensity(GridFunction f);

    static GridDensity uniform(std::size_t intervals, double alpha = 1.0);
    /// Samples f and rescales to unit mass.
    static GridDensity normalized(const std::function<double(double)>& f, std::size_t intervals,
                                  double alpha = 1.0);
    static GridDensity normalized(GridFunction f);

    const GridFunction& function() const { return f_; }
    std::size_t intervals() const { return f_.intervals(); }
    double alpha() const { return f_.alpha(); }
    double operator()(double x) const { return f_.cubic(x); }

    /// Cached log-Hoelder seminorm estimate.
    double log_seminorm() const;

private:
    GridFunction f_;
    mutable std::optional<double> seminorm_cache_;
};

}  // namespace seqclt
