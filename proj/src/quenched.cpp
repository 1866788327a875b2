#include "seqclt/quenched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqclt/covariance.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/orbit.hpp"
#include "seqclt/rng.hpp"
#include "seqclt/transfer.hpp"

namespace seqclt {

RateReport rate_experiment(const SequentialSchedule& schedule, const VectorObservable& phi,
                           const GridDensity& mu, const RateOptions& options) {
    if (options.Ns.empty()) {
        throw ConfigError("rate experiment needs at least one N");
    }
    std::vector<std::size_t> Ns = options.Ns;
    std::sort(Ns.begin(), Ns.end());
    if (std::adjacent_find(Ns.begin(), Ns.end()) != Ns.end() || Ns.front() == 0) {
        throw ConfigError("Ns must be distinct and positive");
    }
    const std::size_t N_max = Ns.back();
    const TransferChain chain(schedule, options.G);
    const ObservableSequence seq = center_sequence(phi, chain, N_max, mu);

    std::vector<DeltaTriple> triples;
    std::vector<std::size_t> breaks{0};
    if (options.growth_grid > 0) {
        triples = dyadic_triples(options.growth_grid);
        breaks = triple_breakpoints(triples, N_max);
    }
    breaks.insert(breaks.end(), Ns.begin(), Ns.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const SegmentSums sums =
        simulate_segments(schedule, seq, mu, breaks, options.M, options.seed, {options.threads});

    RateReport rep;
    std::vector<double> fit_N, fit_dc, fit_se;
    for (std::size_t N : Ns) {
        RatePoint pt;
        pt.N = N;
        const Eigen::MatrixXd S = sums.window_matrix(0, N);
        const CovarianceReport cov = covariance_from_samples(S, 0.0, 1.0, N);
        pt.Sigma = cov.Sigma;
        pt.Sigma_se = cov.se;
        pt.lambda_min = cov.lambda_min;
        pt.lambda_max = cov.lambda_max;
        pt.singular = !cov.invertible;
        if (!pt.singular) {
            const Eigen::MatrixXd W = normalize_samples(S, cov.inv_sqrt);
            const ConvexFamily family = ConvexFamily::generate(options.family, phi.dim(), &W);
            const DcEstimate est = dc_estimate(W, family, options.threads);
            pt.dc = est.value;
            pt.se = est.se;
            pt.max_se = est.max_se;
            pt.argmax = family.set(est.argmax).describe();
            if (pt.dc > 0.0) {
                fit_N.push_back(static_cast<double>(N));
                fit_dc.push_back(pt.dc);
                fit_se.push_back(pt.se);
            }
        }
        rep.points.push_back(std::move(pt));
    }
    if (fit_N.size() >= 3) {
        rep.fit = fit_rate(fit_N, fit_dc, fit_se);
    }
    if (!triples.empty()) {
        rep.growth = check_c1_c2(sums, N_max, triples);
    }
    return rep;
}

SequentialSchedule omega_schedule(const BaseProcess& base, const Atlas& atlas, std::vector<std::size_t> omega) {
    double a = std::numeric_limits<double>::infinity();
    for (const auto& label : base.alphabet()) {
        const auto it = atlas.find(label);
        if (it == atlas.end()) {
            throw ConfigError("unresolved map label '" + label + "'");
        }
        a = std::min(a, it->second->min_slope());
    }
    return SequentialSchedule(OmegaRule{base.alphabet(), std::move(omega)}, atlas, 1, a, 1.0);
}

RateReport quenched_experiment(const BaseProcess& base, const Atlas& atlas, const VectorObservable& phi,
                               const GridDensity& mu, std::uint64_t omega_seed, const RateOptions& options) {
    if (options.Ns.empty()) {
        throw ConfigError("rate experiment needs at least one N");
    }
    const std::size_t N_max = *std::max_element(options.Ns.begin(), options.Ns.end());
    std::vector<std::size_t> omega = base.sample_omega(N_max, omega_seed);
    const SequentialSchedule schedule = omega_schedule(base, atlas, omega);
    RateReport rep = rate_experiment(schedule, phi, mu, options);
    rep.omega_seed = omega_seed;
    rep.omega = std::move(omega);
    if (std::all_of(rep.points.begin(), rep.points.end(), [](const RatePoint& p) { return p.singular; })) {
        throw NumericError("covariance singular at every N for omega seed " + std::to_string(omega_seed));
    }
    return rep;
}

SigmaInfinityReport sigma_infinity_estimate(const BaseProcess& base, const Atlas& atlas,
                                            const VectorObservable& phi, std::size_t N, std::size_t n_omega,
                                            const GridDensity& mu, std::size_t M, std::uint64_t seed,
                                            std::size_t G, unsigned threads) {
    if (n_omega == 0 || N < 4) {
        throw DomainError("Sigma_inf estimate needs n_omega >= 1 and N >= 4");
    }
    SigmaInfinityReport rep;
    rep.levels = {N / 4, N / 2, N};
    const auto d = static_cast<Eigen::Index>(phi.dim());
    std::vector<std::vector<Eigen::MatrixXd>> draws(3);
    std::vector<Eigen::MatrixXd> mc_se2(3, Eigen::MatrixXd::Zero(d, d));
    for (std::size_t w = 0; w < n_omega; ++w) {
        const std::uint64_t omega_seed = derive_seed(seed, 2 * w);
        const SequentialSchedule schedule = omega_schedule(base, atlas, base.sample_omega(N, omega_seed));
        const TransferChain chain(schedule, G);
        const ObservableSequence seq = center_sequence(phi, chain, N, mu);
        std::vector<std::size_t> breaks{0};
        breaks.insert(breaks.end(), rep.levels.begin(), rep.levels.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        const SegmentSums sums = simulate_segments(schedule, seq, mu, breaks, M, derive_seed(seed, 2 * w + 1), {threads});
        for (std::size_t l = 0; l < 3; ++l) {
            const std::size_t L = rep.levels[l];
            const CovarianceReport cov = covariance_from_samples(sums.window_matrix(0, L), 0.0, 1.0, L);
            const double scale = 1.0 / static_cast<double>(L);
            draws[l].push_back(cov.Sigma * scale);
            mc_se2[l] += (cov.se * scale).cwiseProduct(cov.se * scale);
        }
    }
    const double k = static_cast<double>(n_omega);
    for (std::size_t l = 0; l < 3; ++l) {
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
        for (const auto& m : draws[l]) {
            mean += m;
        }
        mean /= k;
        rep.per_level.push_back(mean);
        if (l == 2) {
            rep.Sigma_inf = mean;
            if (n_omega > 1) {
                Eigen::MatrixXd var = Eigen::MatrixXd::Zero(d, d);
                for (const auto& m : draws[l]) {
                    var += (m - mean).cwiseProduct(m - mean);
                }
                rep.se = (var / (k - 1.0) / k).cwiseMax(mc_se2[l] / (k * k)).cwiseSqrt();
            } else {
                rep.se = mc_se2[l].cwiseSqrt();
            }
        }
    }
    for (std::size_t l = 1; l < 3; ++l) {
        rep.drift.push_back((rep.per_level[l] - rep.per_level[l - 1]).cwiseAbs().maxCoeff());
    }
    rep.drift_decreasing = rep.drift[1] <= rep.drift[0];
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.Sigma_inf);
    rep.lambda_min = es.eigenvalues().minCoeff();
    rep.v_proxy = rep.lambda_min > 1e-6 * std::max(es.eigenvalues().maxCoeff(), 1e-300);
    return rep;
}

}  // namespace seqclt
