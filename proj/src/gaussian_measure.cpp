#include "seqclt/gaussian_measure.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "seqclt/errors.hpp"

namespace seqclt {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal quantile needs p in (0,1)");
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double chi_squared_cdf(double d, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    return boost::math::gamma_p(0.5 * d, 0.5 * x);
}

double noncentral_chi_squared_cdf(double d, double lambda, double x, double rel_tol, int max_terms) {
    if (lambda < 0.0 || d <= 0.0) {
        throw DomainError("noncentral chi-squared needs d > 0 and lambda >= 0");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (lambda == 0.0) {
        return chi_squared_cdf(d, x);
    }
    const double half = 0.5 * lambda;
    const auto mode = static_cast<long>(std::floor(half));
    auto log_weight = [half](long j) {
        return -half + static_cast<double>(j) * std::log(half) - std::lgamma(static_cast<double>(j) + 1.0);
    };
    double sum = 0.0;
    int terms = 0;
    auto guard = [&] {
        if (++terms > max_terms) {
            throw NumericError("noncentral chi-squared series did not converge after " +
                               std::to_string(terms) + " terms");
        }
    };
    // Upward from the mode. Past the mode the Poisson weights fall at least
    // geometrically with ratio half / (j + 1), which bounds the tail.
    for (long j = mode;; ++j) {
        guard();
        const double w = std::exp(log_weight(j));
        sum += w * chi_squared_cdf(d + 2.0 * static_cast<double>(j), x);
        const double ratio = half / static_cast<double>(j + 1);
        if (ratio < 1.0 && w * ratio / (1.0 - ratio) <= rel_tol * sum) {
            break;
        }
        if (ratio < 1.0 && sum == 0.0 && w * ratio / (1.0 - ratio) < 1e-300) {
            break;
        }
    }
    // Downward from the mode with ratio j / half.
    for (long j = mode - 1; j >= 0; --j) {
        guard();
        const double w = std::exp(log_weight(j));
        sum += w * chi_squared_cdf(d + 2.0 * static_cast<double>(j), x);
        const double ratio = static_cast<double>(j) / half;
        if (ratio < 1.0 && w * ratio / (1.0 - ratio) <= rel_tol * sum) {
            break;
        }
    }
    return std::min(sum, 1.0);
}

double gaussian_measure(const ConvexSet& C) {
    const auto& shape = C.shape();
    if (const auto* h = std::get_if<HalfSpace>(&shape)) {
        return normal_cdf(h->b);
    }
    if (const auto* b = std::get_if<Ball>(&shape)) {
        const double d = static_cast<double>(b->c.size());
        return noncentral_chi_squared_cdf(d, b->c.squaredNorm(), b->r * b->r);
    }
    const auto& bx = std::get<AxisBox>(shape);
    double p = 1.0;
    for (Eigen::Index i = 0; i < bx.lo.size(); ++i) {
        const double lo = bx.lo(i);
        const double hi = bx.hi(i);
        // Difference of upper tails is more accurate when both ends are positive.
        p *= lo > 0.0 ? normal_cdf(-lo) - normal_cdf(-hi) : normal_cdf(hi) - normal_cdf(lo);
    }
    return p;
}

}  // namespace seqclt
