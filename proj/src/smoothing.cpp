#include "seqclt/smoothing.hpp"

#include "seqclt/errors.hpp"

namespace seqclt {

double smoothing_psi(double x) {
    if (x < 0.0) {
        return 1.0;
    }
    if (x < 0.5) {
        return 1.0 - 2.0 * x * x;
    }
    if (x < 1.0) {
        return 2.0 * (1.0 - x) * (1.0 - x);
    }
    return 0.0;
}

double smoothing_psi_prime(double x) {
    if (x < 0.0 || x >= 1.0) {
        return 0.0;
    }
    if (x < 0.5) {
        return -4.0 * x;
    }
    return -4.0 * (1.0 - x);
}

double smoothed_indicator(const ConvexSet& C, double eps, const Eigen::VectorXd& x) {
    if (!(eps > 0.0)) {
        throw DomainError("smoothing width must be positive");
    }
    return smoothing_psi(C.dist(x) / eps);
}

Eigen::VectorXd smoothed_indicator_gradient(const ConvexSet& C, double eps, const Eigen::VectorXd& x) {
    if (!(eps > 0.0)) {
        throw DomainError("smoothing width must be positive");
    }
    const Eigen::VectorXd diff = x - C.project(x);
    const double dist = diff.norm();
    if (dist == 0.0) {
        return Eigen::VectorXd::Zero(x.size());
    }
    return diff * (smoothing_psi_prime(dist / eps) / (eps * dist));
}

}  // namespace seqclt
