#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>

#include "seqclt/observable.hpp"
#include "seqclt/orbit.hpp"
#include "seqclt/transfer.hpp"

namespace seqclt {

struct CovarianceReport {
    Eigen::MatrixXd Sigma;
    Eigen::MatrixXd se;  // per-entry Monte-Carlo standard errors
    Eigen::MatrixXd inv_sqrt;  // empty unless invertible
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::size_t M = 0;
    double delta1 = 0.0;
    double delta2 = 1.0;
    std::size_t N = 0;
    bool invertible = false;
};

/// Symmetric inverse square root by eigendecomposition; throws
/// SingularCovarianceError when lambda_min <= tol.
Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& Sigma, double tol);

/// mu(S (x) S) estimated from rows of S (samples x d) without subtracting
/// the sample mean, since S is centred by construction. Invertibility uses
/// the tolerance rel_tol * lambda_max.
CovarianceReport covariance_from_samples(const Eigen::MatrixXd& S, double delta1, double delta2,
                                         std::size_t N, double rel_tol = 1e-8);

CovarianceReport covariance_matrix(const SequentialSchedule& schedule, const ObservableSequence& phis,
                                   double delta1, double delta2, std::size_t N, const GridDensity& mu,
                                   std::size_t M, std::uint64_t seed,
                                   const SimulationOptions& options = {});

/// Small-N oracle: Sigma as the double sum of centred pair correlations
/// computed with transfer operators.
Eigen::MatrixXd correlation_sum_covariance(const TransferChain& chain, const VectorObservable& phi,
                                           double delta1, double delta2, std::size_t N,
                                           const GridDensity& mu);

/// W = Sigma^{-1/2} S applied to every row.
Eigen::MatrixXd normalize_samples(const Eigen::MatrixXd& S, const Eigen::MatrixXd& inv_sqrt);

}  // namespace seqclt
