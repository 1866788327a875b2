#include "seqclt/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "seqclt/errors.hpp"

namespace seqclt {

namespace {

void legendre(std::size_t n, double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
}

QuadratureRule compute_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double p = 0.0;
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            legendre(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        legendre(n, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
    if (n == 0) {
        throw DomainError("quadrature order must be positive");
    }
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, compute_legendre(n)).first;
    }
    return it->second;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    QuadratureRule rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

QuadratureRule gauss_hermite(std::size_t n) {
    if (n == 0) {
        throw DomainError("quadrature order must be positive");
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const double off = std::sqrt(static_cast<double>(k));
        J(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
        J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
    QuadratureRule rule;
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        rule.nodes.push_back(solver.eigenvalues()(idx));
        const double v0 = solver.eigenvectors()(0, idx);
        rule.weights.push_back(v0 * v0);
    }
    return rule;
}

QuadratureRule tau_rule(std::size_t per_half) {
    const double r = std::sqrt(0.5);
    const QuadratureRule gl = gauss_legendre(per_half, 0.0, r);
    QuadratureRule rule;
    for (std::size_t i = 0; i < per_half; ++i) {
        const double u = gl.nodes[i];
        rule.nodes.push_back(u * u);
        rule.weights.push_back(gl.weights[i] * 2.0 * u);
    }
    for (std::size_t i = per_half; i-- > 0;) {
        const double s = gl.nodes[i];
        rule.nodes.push_back(1.0 - s * s);
        rule.weights.push_back(gl.weights[i] * 2.0 * s);
    }
    return rule;
}

double integrate_composite(const std::function<double(double)>& f,
                           const std::vector<double>& breakpoints, std::size_t order) {
    const QuadratureRule gl = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        const double a = breakpoints[k];
        const double b = breakpoints[k + 1];
        if (!(b > a)) {
            continue;
        }
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double part = 0.0;
        for (std::size_t i = 0; i < order; ++i) {
            part += gl.weights[i] * f(mid + half * gl.nodes[i]);
        }
        total += half * part;
    }
    return total;
}

}  // namespace seqclt
