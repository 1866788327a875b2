#include "seqclt/growth_check.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "seqclt/covariance.hpp"
#include "seqclt/errors.hpp"

namespace seqclt {

namespace {

struct Eigs {
    double min = 0.0;
    double max = 0.0;
};

/// Second-moment matrix of all segment sums, (segments * d) square.
Eigen::MatrixXd segment_moments(const SegmentSums& sums) {
    const std::size_t K = sums.segments();
    const std::size_t d = sums.dim();
    const auto n = static_cast<Eigen::Index>(K * d);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(sums.samples()), n);
    for (std::size_t i = 0; i < sums.samples(); ++i) {
        for (std::size_t s = 0; s < K; ++s) {
            const double* r = sums.row(i, s);
            for (std::size_t k = 0; k < d; ++k) {
                X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s * d + k)) = r[k];
            }
        }
    }
    return (X.transpose() * X) / static_cast<double>(sums.samples());
}

}  // namespace

std::vector<DeltaTriple> dyadic_triples(std::size_t k) {
    std::vector<DeltaTriple> out;
    const double kd = static_cast<double>(k);
    for (std::size_t a = 0; a <= k; ++a) {
        for (std::size_t b = a; b <= k; ++b) {
            for (std::size_t c = b; c <= k; ++c) {
                out.push_back({a / kd, b / kd, c / kd});
            }
        }
    }
    return out;
}

std::vector<std::size_t> triple_breakpoints(const std::vector<DeltaTriple>& triples, std::size_t N) {
    std::vector<std::size_t> bps;
    for (const auto& t : triples) {
        for (double v : {t.delta1, t.delta, t.delta2}) {
            bps.push_back(window_indices(v, v, N).first);
        }
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    return bps;
}

GrowthReport check_c1_c2(const SegmentSums& sums, std::size_t N,
                         const std::vector<DeltaTriple>& triples) {
    const Eigen::MatrixXd moments = segment_moments(sums);
    const auto d = static_cast<Eigen::Index>(sums.dim());
    std::map<std::pair<std::size_t, std::size_t>, Eigs> cache;

    auto window_eigs = [&](double a, double b) -> Eigs {
        const auto w = window_indices(a, b, N);
        if (w.size() == 0) {
            return {};
        }
        const auto [sa, sb] = sums.segment_range(w.first, w.last);
        const auto key = std::make_pair(sa, sb);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
        Eigen::MatrixXd Sigma = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t s = sa; s < sb; ++s) {
            for (std::size_t t = sa; t < sb; ++t) {
                Sigma += moments.block(static_cast<Eigen::Index>(s) * d, static_cast<Eigen::Index>(t) * d, d, d);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (Sigma + Sigma.transpose()),
                                                              Eigen::EigenvaluesOnly);
        const Eigs e{solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
        cache.emplace(key, e);
        return e;
    };

    GrowthReport report;
    constexpr double inf = std::numeric_limits<double>::infinity();
    report.C0_by_K0.fill(1.0);
    report.C0_fit = 1.0;
    report.C0prime_fit = 1.0;

    for (const auto& t : triples) {
        TripleResult r;
        r.triple = t;
        const bool c1 = std::abs(t.delta2 - t.delta) >= std::abs(t.delta - t.delta1);
        r.branch = c1 ? "C1" : "C2";
        const Eigs outer = window_eigs(t.delta1, t.delta2);
        if (window_indices(t.delta1, t.delta2, N).size() == 0) {
            r.skipped = true;
            ++report.skipped;
            report.triples.push_back(r);
            continue;
        }
        const Eigs sub = c1 ? window_eigs(t.delta, t.delta2) : window_eigs(t.delta1, t.delta);
        r.lambda_max = outer.max;
        r.lambda_min_sub = sub.min;
        const double width = t.delta2 - t.delta1;
        const double tol = 1e-8 * std::max(outer.max, 1e-300);

        for (std::size_t g = 0; g < GrowthReport::kK0Grid.size(); ++g) {
            const double threshold = std::pow(width, -GrowthReport::kK0Grid[g]);
            double need = 1.0;
            if (outer.max > threshold) {
                need = sub.min > tol ? outer.max / sub.min : inf;
            }
            report.C0_by_K0[g] = std::max(report.C0_by_K0[g], need);
            if (g + 1 == GrowthReport::kK0Grid.size()) {
                r.required_C0 = need;
            }
        }
        report.C0prime_fit = std::max(report.C0prime_fit, outer.max * width);
        report.triples.push_back(r);
    }
    report.K0_fit = 1.0;
    report.C0_fit = report.C0_by_K0.back();
    for (auto& r : report.triples) {
        if (!r.skipped) {
            r.pass = std::isfinite(r.required_C0);
            report.failed += r.pass ? 0 : 1;
        }
    }
    return report;
}

}  // namespace seqclt
