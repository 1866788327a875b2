#include "seqclt/covariance.hpp"

#include <cmath>

#include "seqclt/correlation.hpp"
#include "seqclt/errors.hpp"

namespace seqclt {

Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& Sigma, double tol) {
    if (Sigma.rows() != Sigma.cols()) {
        throw DomainError("inverse square root of a non-square matrix");
    }
    if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, Sigma.cwiseAbs().maxCoeff())) {
        throw DomainError("inverse square root of a non-symmetric matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (Sigma + Sigma.transpose()));
    const Eigen::VectorXd ev = solver.eigenvalues();
    if (!(ev.minCoeff() > tol)) {
        throw SingularCovarianceError("covariance is singular: lambda_min = " +
                                      std::to_string(ev.minCoeff()));
    }
    const Eigen::MatrixXd V = solver.eigenvectors();
    return V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
}

CovarianceReport covariance_from_samples(const Eigen::MatrixXd& S, double delta1, double delta2,
                                         std::size_t N, double rel_tol) {
    CovarianceReport r;
    const auto M = S.rows();
    const auto d = S.cols();
    r.M = static_cast<std::size_t>(M);
    r.delta1 = delta1;
    r.delta2 = delta2;
    r.N = N;
    r.Sigma = Eigen::MatrixXd::Zero(d, d);
    r.se = Eigen::MatrixXd::Zero(d, d);
    if (M == 0) {
        throw DomainError("covariance of an empty sample");
    }
    const double Md = static_cast<double>(M);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a; b < d; ++b) {
            const Eigen::ArrayXd prod = S.col(a).array() * S.col(b).array();
            const double mean = prod.sum() / Md;
            const double var = M > 1 ? (prod - mean).square().sum() / (Md - 1.0) : 0.0;
            r.Sigma(a, b) = r.Sigma(b, a) = mean;
            r.se(a, b) = r.se(b, a) = std::sqrt(var / Md);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(r.Sigma, Eigen::EigenvaluesOnly);
    r.lambda_min = solver.eigenvalues().minCoeff();
    r.lambda_max = solver.eigenvalues().maxCoeff();
    const double tol = rel_tol * r.lambda_max;
    if (r.lambda_max > 0.0 && r.lambda_min > tol) {
        r.inv_sqrt = inv_sqrt(r.Sigma, tol);
        r.invertible = true;
    }
    return r;
}

CovarianceReport covariance_matrix(const SequentialSchedule& schedule, const ObservableSequence& phis,
                                   double delta1, double delta2, std::size_t N, const GridDensity& mu,
                                   std::size_t M, std::uint64_t seed, const SimulationOptions& options) {
    const auto w = window_indices(delta1, delta2, N);
    if (w.size() == 0) {
        return covariance_from_samples(
            Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(phis.phi.dim())),
            delta1, delta2, N);
    }
    const auto sums = simulate_segments(schedule, phis, mu, {w.first, w.last}, M, seed, options);
    return covariance_from_samples(sums.window_matrix(w.first, w.last), delta1, delta2, N);
}

Eigen::MatrixXd correlation_sum_covariance(const TransferChain& chain, const VectorObservable& phi,
                                           double delta1, double delta2, std::size_t N,
                                           const GridDensity& mu) {
    const auto w = window_indices(delta1, delta2, N);
    const auto d = static_cast<Eigen::Index>(phi.dim());
    Eigen::MatrixXd Sigma = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index s = 0; s < d; ++s) {
            const auto& fr = phi.component(static_cast<std::size_t>(r));
            const auto& fs = phi.component(static_cast<std::size_t>(s));
            for (std::size_t n = w.first; n < w.last; ++n) {
                for (std::size_t m = w.first; m < w.last; ++m) {
                    const bool ordered = n <= m;
                    const ScalarFn a = [&](double x) { return (ordered ? fr : fs)(x); };
                    const ScalarFn b = [&](double x) { return (ordered ? fs : fr)(x); };
                    const std::size_t lo = ordered ? n : m;
                    const std::size_t hi = ordered ? m : n;
                    Sigma(r, s) += correlation2(chain, a, b, lo, hi - lo, mu, 0).transfer;
                }
            }
        }
    }
    return 0.5 * (Sigma + Sigma.transpose());
}

Eigen::MatrixXd normalize_samples(const Eigen::MatrixXd& S, const Eigen::MatrixXd& inv_sqrt) {
    return S * inv_sqrt.transpose();
}

}  // namespace seqclt
