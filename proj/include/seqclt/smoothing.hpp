#pragma once

#include <Eigen/Dense>

#include "seqclt/convex.hpp"

namespace seqclt {

/// 1 for x < 0, 1 - 2x^2 on [0, 1/2), 2(1 - x)^2 on [1/2, 1), 0 beyond.
double smoothing_psi(double x);
double smoothing_psi_prime(double x);

/// h_{C,eps}(x) = psi(dist(x, C) / eps).
double smoothed_indicator(const ConvexSet& C, double eps, const Eigen::VectorXd& x);
Eigen::VectorXd smoothed_indicator_gradient(const ConvexSet& C, double eps, const Eigen::VectorXd& x);

}  // namespace seqclt
