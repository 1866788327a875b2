#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqclt/base_process.hpp"
#include "seqclt/dc_estimate.hpp"
#include "seqclt/growth_check.hpp"
#include "seqclt/observable.hpp"
#include "seqclt/rate.hpp"
#include "seqclt/schedule.hpp"

namespace seqclt {

struct RateOptions {
    std::vector<std::size_t> Ns;
    std::size_t M = 100000;
    std::uint64_t seed = 1;
    FamilySpec family;
    std::size_t G = 4096;
    /// Grid {0, 1/k, ..., 1} of (C1)/(C2) triples at the largest N; 0 skips.
    std::size_t growth_grid = 0;
    unsigned threads = 1;
};

struct RatePoint {
    std::size_t N = 0;
    bool singular = false;
    double dc = 0.0;
    double se = 0.0;
    double max_se = 0.0;
    std::string argmax;
    Eigen::MatrixXd Sigma;
    Eigen::MatrixXd Sigma_se;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct RateReport {
    std::vector<RatePoint> points;
    std::optional<RateFit> fit;
    std::optional<GrowthReport> growth;
    std::optional<std::uint64_t> omega_seed;
    std::vector<std::size_t> omega;
};

/// Centres phi along the schedule, simulates one set of orbits up to the
/// largest N and, for every N, normalises the prefix sums and estimates
/// d_c over a family fitted to the normalised samples. Singular
/// covariances are flagged and left out of the fit.
RateReport rate_experiment(const SequentialSchedule& schedule, const VectorObservable& phi,
                           const GridDensity& mu, const RateOptions& options);

/// The sequential schedule T_n = alphabet[omega_n].
SequentialSchedule omega_schedule(const BaseProcess& base, const Atlas& atlas,
                                  std::vector<std::size_t> omega);

/// rate_experiment for one draw of omega; throws NumericError when every N
/// is singular.
RateReport quenched_experiment(const BaseProcess& base, const Atlas& atlas, const VectorObservable& phi,
                               const GridDensity& mu, std::uint64_t omega_seed, const RateOptions& options);

struct SigmaInfinityReport {
    std::vector<std::size_t> levels;  // N/4, N/2, N
    std::vector<Eigen::MatrixXd> per_level;  // average of Sigma_N(omega)/N
    Eigen::MatrixXd Sigma_inf;
    Eigen::MatrixXd se;
    std::vector<double> drift;  // max entry change between successive levels
    bool drift_decreasing = false;
    double lambda_min = 0.0;
    bool v_proxy = false;  // lambda_min > 1e-6 lambda_max
};

SigmaInfinityReport sigma_infinity_estimate(const BaseProcess& base, const Atlas& atlas,
                                            const VectorObservable& phi, std::size_t N, std::size_t n_omega,
                                            const GridDensity& mu, std::size_t M, std::uint64_t seed,
                                            std::size_t G = 4096, unsigned threads = 1);

}  // namespace seqclt
