#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace seqclt {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Legendre mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// Gauss-Hermite for the standard normal weight; weights sum to 1.
QuadratureRule gauss_hermite(std::size_t n);

/// Rule on (0, 1) for integrands with inverse square-root singularities at
/// both ends: tau = u^2 on (0, 1/2] and tau = 1 - s^2 on [1/2, 1), each half
/// by Gauss-Legendre. Weights include the Jacobians.
QuadratureRule tau_rule(std::size_t per_half = 32);

/// Composite Gauss-Legendre over the given breakpoints.
double integrate_composite(const std::function<double(double)>& f,
                           const std::vector<double>& breakpoints, std::size_t order = 16);

}  // namespace seqclt
