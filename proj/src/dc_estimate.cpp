#include "seqclt/dc_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seqclt/errors.hpp"
#include "seqclt/gaussian_measure.hpp"
#include "seqclt/parallel.hpp"
#include "seqclt/rng.hpp"
#include "seqclt/sampling.hpp"
#include "seqclt/smoothing.hpp"
#include "seqclt/stein.hpp"

namespace seqclt {

namespace {

Eigen::VectorXd random_direction(Rng& rng, std::size_t d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    do {
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            v(k) = rng.normal();
        }
    } while (v.norm() < 1e-8);
    return v / v.norm();
}

double sample_quantile(std::vector<double> values, double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    std::nth_element(values.begin(), values.begin() + static_cast<long>(lo), values.end());
    const double vlo = values[lo];
    if (hi == lo) {
        return vlo;
    }
    const double vhi = *std::min_element(values.begin() + static_cast<long>(lo) + 1, values.end());
    return vlo + (pos - static_cast<double>(lo)) * (vhi - vlo);
}

double gaussian_stat_se(double p, std::size_t M) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(M));
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ConvexFamily::ConvexFamily(std::vector<ConvexSet> sets) : sets_(std::move(sets)) {
    if (sets_.empty()) {
        throw DomainError("convex family must be nonempty");
    }
    const std::size_t d = sets_.front().dim();
    gaussian_.reserve(sets_.size());
    for (const auto& C : sets_) {
        if (C.dim() != d) {
            throw DomainError("convex family mixes dimensions");
        }
        gaussian_.push_back(gaussian_measure(C));
    }
}

std::vector<Eigen::VectorXd> direction_set(std::size_t d, std::size_t count, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> dirs;
    if (d == 1) {
        dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
        dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
        return dirs;
    }
    for (std::size_t k = 0; k < count; ++k) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(d));
        if (d == 2) {
            const double angle = (static_cast<double>(k) + 0.5) * 2.0 * std::numbers::pi / static_cast<double>(count);
            v << std::cos(angle), std::sin(angle);
        } else if (d == 3) {
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double angle = golden * static_cast<double>(k);
            v << rho * std::cos(angle), rho * std::sin(angle), z;
        } else {
            Rng rng(derive_seed(seed, 0x5eed0000ULL + k));
            v = random_direction(rng, d);
        }
        dirs.push_back(v);
    }
    return dirs;
}

ConvexFamily ConvexFamily::generate(const FamilySpec& spec, std::size_t d, const Eigen::MatrixXd* samples) {
    if (d == 0) {
        throw DomainError("family dimension must be positive");
    }
    if (samples != nullptr && static_cast<std::size_t>(samples->cols()) != d) {
        throw DomainError("family samples have the wrong dimension");
    }
    std::vector<ConvexSet> sets;
    for (const auto& a : direction_set(d, spec.directions, spec.seed)) {
        std::vector<double> proj;
        if (samples != nullptr && samples->rows() > 0) {
            const Eigen::VectorXd p = (*samples) * a;
            proj.assign(p.data(), p.data() + p.size());
        }
        for (double q : spec.quantiles) {
            if (sets.size() >= spec.halfspaces) {
                break;
            }
            const double b = proj.empty() ? normal_quantile(q) : sample_quantile(proj, q);
            sets.push_back(ConvexSet::half_space(a, b));
        }
    }
    Rng rng(derive_seed(spec.seed, 1));
    while (sets.size() < spec.halfspaces) {
        const Eigen::VectorXd a = random_direction(rng, d);
        sets.push_back(ConvexSet::half_space(a, -2.5 + 5.0 * rng.uniform()));
    }
    for (std::size_t k = 0; k < spec.balls; ++k) {
        Eigen::VectorXd c(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            c(i) = spec.ball_center_range * (2.0 * rng.uniform() - 1.0);
        }
        const double r = spec.ball_r_min + (spec.ball_r_max - spec.ball_r_min) * rng.uniform();
        sets.push_back(ConvexSet::ball(c, r));
    }
    for (std::size_t k = 0; k < spec.boxes; ++k) {
        Eigen::VectorXd lo(static_cast<Eigen::Index>(d));
        Eigen::VectorXd hi(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            const double centre = 2.0 * rng.uniform() - 1.0;
            const double half = 0.3 + 1.7 * rng.uniform();
            lo(i) = centre - half;
            hi(i) = centre + half;
        }
        sets.push_back(ConvexSet::box(lo, hi));
    }
    return ConvexFamily(std::move(sets));
}

EmpiricalMeasure empirical_measure(const Eigen::MatrixXd& samples, const ConvexSet& C) {
    const auto M = static_cast<std::size_t>(samples.rows());
    if (M == 0) {
        throw DomainError("empirical measure needs at least one sample");
    }
    if (static_cast<std::size_t>(samples.cols()) != C.dim()) {
        throw DomainError("sample dimension does not match the set");
    }
    std::size_t inside = 0;
    Eigen::VectorXd x(samples.cols());
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        x = samples.row(i).transpose();
        inside += C.contains(x) ? 1 : 0;
    }
    EmpiricalMeasure out;
    out.p = static_cast<double>(inside) / static_cast<double>(M);
    out.se = gaussian_stat_se(out.p, M);
    return out;
}

DcEstimate dc_estimate(const Eigen::MatrixXd& samples, const ConvexFamily& family, unsigned threads) {
    DcEstimate est;
    est.rows.resize(family.size());
    parallel_chunks(family.size(), threads, [&](std::size_t i) {
        const ConvexSet& C = family.set(i);
        const auto emp = empirical_measure(samples, C);
        DcRow& row = est.rows[i];
        row.shape = C.kind();
        row.params = C.describe();
        row.params_hash = fnv1a(row.params);
        row.empirical = emp.p;
        row.gaussian = family.gaussian(i);
        row.diff = std::abs(emp.p - row.gaussian);
        row.se = emp.se;
    });
    for (std::size_t i = 0; i < est.rows.size(); ++i) {
        if (est.rows[i].diff > est.value || i == 0) {
            est.value = est.rows[i].diff;
            est.argmax = i;
        }
        est.max_se = std::max(est.max_se, est.rows[i].se);
    }
    est.se = est.rows[est.argmax].se;
    return est;
}

ShellReport shell_bound_check(const ConvexFamily& family, double eps, std::size_t mc_points,
                              std::uint64_t seed, unsigned threads) {
    if (!(eps > 0.0)) {
        throw DomainError("shell width must be positive");
    }
    if (mc_points == 0) {
        throw DomainError("shell check needs at least one Monte-Carlo point");
    }
    const std::size_t d = family.dim();
    const auto D = static_cast<Eigen::Index>(d);
    const std::size_t K = family.size();
    std::vector<std::optional<ConvexSet>> shrunk(K);
    for (std::size_t i = 0; i < K; ++i) {
        shrunk[i] = family.set(i).shrunk(eps);
    }
    const std::size_t chunks = (mc_points + kChunkSize - 1) / kChunkSize;
    std::vector<std::vector<std::uint64_t>> counts(chunks);
    parallel_chunks(chunks, threads, [&](std::size_t c) {
        std::vector<std::uint64_t> local(2 * K, 0);
        Rng rng(derive_seed(seed, c));
        Eigen::VectorXd x(D);
        const std::size_t end = std::min(mc_points, (c + 1) * kChunkSize);
        for (std::size_t s = c * kChunkSize; s < end; ++s) {
            for (Eigen::Index k = 0; k < D; ++k) {
                x(k) = rng.normal();
            }
            for (std::size_t i = 0; i < K; ++i) {
                const ConvexSet& C = family.set(i);
                if (C.contains(x)) {
                    if (!(shrunk[i] && shrunk[i]->contains(x))) {
                        ++local[2 * i + 1];
                    }
                } else if (C.dist(x) <= eps) {
                    ++local[2 * i];
                }
            }
        }
        counts[c] = std::move(local);
    });
    ShellReport rep;
    rep.eps = eps;
    rep.mc_points = mc_points;
    rep.bound = 4.0 * std::pow(static_cast<double>(d), 0.25) * eps;
    for (std::size_t i = 0; i < K; ++i) {
        std::uint64_t outer = 0;
        std::uint64_t inner = 0;
        for (const auto& local : counts) {
            outer += local[2 * i];
            inner += local[2 * i + 1];
        }
        ShellRow row;
        const ConvexSet& C = family.set(i);
        row.shape = C.kind();
        row.params = C.describe();
        row.outer = static_cast<double>(outer) / static_cast<double>(mc_points);
        row.inner = static_cast<double>(inner) / static_cast<double>(mc_points);
        row.outer_se = gaussian_stat_se(row.outer, mc_points);
        row.inner_se = gaussian_stat_se(row.inner, mc_points);
        if (C.kind() != "box") {
            row.outer_exact = gaussian_measure(C.inflated(eps)) - family.gaussian(i);
        }
        row.bound = rep.bound;
        row.pass = row.outer <= rep.bound + 3.0 * row.outer_se && row.inner <= rep.bound + 3.0 * row.inner_se;
        rep.failed += row.pass ? 0 : 1;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

SmoothingBoundReport smoothing_bound_check(const Eigen::MatrixXd& samples, const ConvexFamily& family,
                                           double eps, unsigned threads) {
    const std::size_t d = family.dim();
    const auto M = static_cast<std::size_t>(samples.rows());
    if (M == 0) {
        throw DomainError("smoothing bound check needs samples");
    }
    const GaussianRule rule = default_gaussian_rule(d);
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    struct Term {
        double diff = 0.0;
        double se = 0.0;
    };
    std::vector<Term> terms(2 * family.size());
    parallel_chunks(family.size(), threads, [&](std::size_t i) {
        const ConvexSet& C = family.set(i);
        const std::optional<ConvexSet> inner = C.shrunk(eps);
        for (int which = 0; which < 2; ++which) {
            if (which == 1 && !inner) {
                continue;
            }
            const SmoothedIndicatorFunction h(which == 0 ? C : *inner, eps);
            std::vector<double> values(M);
            Eigen::VectorXd x(static_cast<Eigen::Index>(d));
            for (std::size_t s = 0; s < M; ++s) {
                x = samples.row(static_cast<Eigen::Index>(s)).transpose();
                values[s] = h(x);
            }
            const double mean = pairwise_sum(values) / static_cast<double>(M);
            double var = 0.0;
            for (double v : values) {
                var += (v - mean) * (v - mean);
            }
            var /= static_cast<double>(std::max<std::size_t>(M, 2) - 1);
            Term& t = terms[2 * i + static_cast<std::size_t>(which)];
            t.diff = std::abs(mean - h.gaussian_expectation(origin, 1.0, rule));
            t.se = std::sqrt(var / static_cast<double>(M));
        }
    });
    SmoothingBoundReport rep;
    rep.eps = eps;
    rep.dc = dc_estimate(samples, family, threads).value;
    rep.shell_term = 4.0 * std::pow(static_cast<double>(d), 0.25) * eps;
    for (const auto& t : terms) {
        if (t.diff >= rep.max_smooth_diff) {
            rep.max_smooth_diff = t.diff;
        }
        rep.se = std::max(rep.se, t.se);
    }
    rep.bound = rep.shell_term + rep.max_smooth_diff + 3.0 * rep.se;
    rep.pass = rep.dc <= rep.bound;
    return rep;
}

}  // namespace seqclt
