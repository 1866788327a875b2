#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "seqclt/convex.hpp"
#include "seqclt/quadrature.hpp"

namespace seqclt {

/// Cubature for E[f(Z)], Z ~ N_d; rows of `points` are nodes.
struct GaussianRule {
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;
    std::string scheme;

    std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

GaussianRule tensor_gauss_hermite(std::size_t d, std::size_t order);
/// Halton points pushed through the normal quantile, equal weights.
GaussianRule quasi_random_gaussian(std::size_t d, std::size_t count);
/// Tensor Gauss-Hermite of order 24 for d <= 3, 2^14 quasi-random points above.
GaussianRule default_gaussian_rule(std::size_t d);

struct SteinQuadrature {
    QuadratureRule tau;
    GaussianRule gauss;
    GaussianRule gauss_coarse;  // for error estimates of generic test functions

    static SteinQuadrature defaults(std::size_t d, std::size_t tau_per_half = 32);
};

class TestFunction {
public:
    virtual ~TestFunction() = default;

    virtual std::size_t dim() const = 0;
    virtual double operator()(const Eigen::VectorXd& x) const = 0;

    /// E[h(mean + scale Z)]. The default applies the cubature rule.
    virtual double gaussian_expectation(const Eigen::VectorXd& mean, double scale,
                                        const GaussianRule& rule) const;
    /// True when gaussian_expectation ignores the rule and is accurate to
    /// roughly machine precision.
    virtual bool exact_expectation() const { return false; }
    /// E[h(mean + scale Z) He_rs(Z)] and E[h(mean + scale Z) He_rst(Z)] by a
    /// one-dimensional reduction; returns false when only the rule applies.
    virtual bool hermite_moments(const Eigen::VectorXd& mean, double scale, Eigen::MatrixXd& m2,
                                 std::vector<double>& m3) const;
};

class CallableTestFunction : public TestFunction {
public:
    CallableTestFunction(std::size_t d, std::function<double(const Eigen::VectorXd&)> h);

    std::size_t dim() const override { return d_; }
    double operator()(const Eigen::VectorXd& x) const override { return h_(x); }

private:
    std::size_t d_;
    std::function<double(const Eigen::VectorXd&)> h_;
};

/// h(x) = a.x + b.
class LinearTestFunction : public TestFunction {
public:
    LinearTestFunction(Eigen::VectorXd a, double b = 0.0);

    std::size_t dim() const override { return static_cast<std::size_t>(a_.size()); }
    double operator()(const Eigen::VectorXd& x) const override { return a_.dot(x) + b_; }
    double gaussian_expectation(const Eigen::VectorXd& mean, double scale,
                                const GaussianRule& rule) const override;
    bool exact_expectation() const override { return true; }

private:
    Eigen::VectorXd a_;
    double b_;
};

/// h_{C,eps}. Gaussian expectations are semi-analytic (one-dimensional
/// reductions with breakpoints at the kinks of psi) for half-spaces, balls
/// with d <= 3 and boxes with d <= 2; other cases use the rule.
class SmoothedIndicatorFunction : public TestFunction {
public:
    SmoothedIndicatorFunction(ConvexSet set, double eps);

    std::size_t dim() const override { return set_.dim(); }
    double operator()(const Eigen::VectorXd& x) const override;
    double gaussian_expectation(const Eigen::VectorXd& mean, double scale,
                                const GaussianRule& rule) const override;
    bool exact_expectation() const override;
    /// Available for half-spaces in any dimension and for every shape when d = 1.
    bool hermite_moments(const Eigen::VectorXd& mean, double scale, Eigen::MatrixXd& m2,
                         std::vector<double>& m3) const override;

    const ConvexSet& set() const { return set_; }
    double eps() const { return eps_; }

private:
    ConvexSet set_;
    double eps_;
};

struct SteinValue {
    double value = 0.0;
    double error = 0.0;
};

/// g(w, tau) = -1/(2(1-tau)) E[h(sqrt(1-tau) w - sqrt(tau) Z) - h(Z)].
SteinValue stein_g(const TestFunction& h, const Eigen::VectorXd& w, double tau,
                   const SteinQuadrature& quad);

struct SteinDerivatives {
    std::size_t d = 0;
    Eigen::MatrixXd g_rs;
    std::vector<double> g_rst;  // row-major d^3

    double rst(std::size_t r, std::size_t s, std::size_t t) const { return g_rst[(r * d + s) * d + t]; }
};

/// Second and third w-derivatives of g from Hermite-weighted Gaussian
/// integrals: g_rs = -1/(2 tau) int h phi_rs and
/// g_rst = -sqrt(1-tau)/(2 tau^{3/2}) int h phi_rst, both at the argument
/// sqrt(1-tau) w - sqrt(tau) z.
SteinDerivatives stein_g_derivs(const TestFunction& h, const Eigen::VectorXd& w, double tau,
                                const SteinQuadrature& quad);

/// f_h(w) = int_0^1 g(w, tau) dtau.
SteinValue stein_solution(const TestFunction& h, const Eigen::VectorXd& w, const SteinQuadrature& quad);

/// N_d[h].
double gaussian_mean(const TestFunction& h, const SteinQuadrature& quad);

struct ResidualReport {
    double residual = 0.0;
    double lhs = 0.0;  // Laplacian f - w . grad f
    double rhs = 0.0;  // h(w) - N_d[h]
    double fd_error = 0.0;
    double quad_error = 0.0;
    double budget = 0.0;
    bool flagged = false;
};

/// |Laplacian f - w . grad f - (h(w) - N_d[h])| with central differences at
/// step fd_step * max(1, |w|).
ResidualReport stein_residual(const TestFunction& h, const Eigen::VectorXd& w,
                              const SteinQuadrature& quad, double fd_step = 1e-3);

/// N_d[g_rst(., tau)] = (sqrt(1-tau)/2) int h phi_rst, row-major d^3.
std::vector<double> gauss_third_deriv_functional(const TestFunction& h, double tau,
                                                 const SteinQuadrature& quad);

/// max over (r,s,t) of int |phi_rst|.
double third_deriv_abs_integral(std::size_t d);

/// He_rst(z) with phi_rst = -He_rst phi.
double hermite3(const Eigen::VectorXd& z, std::size_t r, std::size_t s, std::size_t t);

}  // namespace seqclt
