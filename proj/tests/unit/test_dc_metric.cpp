#include <cmath>

#include "doctest.h"
#include "seqclt/convex.hpp"
#include "seqclt/dc_estimate.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/gaussian_measure.hpp"
#include "seqclt/rng.hpp"

using namespace seqclt;
using doctest::Approx;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++) = x;
    }
    return out;
}

Eigen::MatrixXd gaussian_samples(std::size_t M, std::size_t d, std::uint64_t seed, Eigen::VectorXd shift = {}) {
    Rng rng(seed);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out.data()[i] = rng.normal();
    }
    if (shift.size() > 0) {
        out.rowwise() += shift.transpose();
    }
    return out;
}

}  // namespace

TEST_CASE("dist_to_convex") {
    CHECK(dist_to_convex(ConvexSet::half_space(vec({1.0, 0.0}), 0.0), vec({0.5, 0.0})) == Approx(0.5));
    CHECK(dist_to_convex(ConvexSet::ball(vec({0.0, 0.0}), 1.0), vec({0.6, 0.8})) == Approx(0.0).epsilon(1e-15));
    CHECK(dist_to_convex(ConvexSet::box(vec({-1.0, -1.0}), vec({1.0, 1.0})), vec({2.0, 2.0})) == Approx(std::sqrt(2.0)));
    CHECK(dist_to_convex(ConvexSet::box(vec({-1.0, -1.0}), vec({1.0, 1.0})), vec({0.2, 0.3})) == 0.0);
}

TEST_CASE("convex set invariants are enforced") {
    CHECK_THROWS_AS(ConvexSet::ball(vec({0.0}), 0.0), DomainError);
    CHECK_THROWS_AS(ConvexSet::box(vec({1.0, 0.0}), vec({0.0, 1.0})), DomainError);
    CHECK_THROWS_AS(ConvexSet::half_space(vec({3.0, 4.0}), 1.0), DomainError);
    const auto h = ConvexSet::half_space(vec({0.6, 0.8}), 1.0);
    CHECK(std::abs(std::get<HalfSpace>(h.shape()).a.norm() - 1.0) < 1e-12);
}

TEST_CASE("gaussian_measure closed forms") {
    CHECK(gaussian_measure(ConvexSet::half_space(vec({0.0, 1.0}), 0.0)) == Approx(0.5).epsilon(1e-15));
    for (double r : {0.3, 1.0, 2.5}) {
        CHECK(gaussian_measure(ConvexSet::ball(vec({0.0, 0.0}), r)) == Approx(1.0 - std::exp(-r * r / 2)).epsilon(1e-12));
    }
    const double p1 = 2.0 * normal_cdf(1.0) - 1.0;
    CHECK(gaussian_measure(ConvexSet::box(vec({-1.0, -1.0}), vec({1.0, 1.0}))) == Approx(p1 * p1).epsilon(1e-14));
    // d = 1 off-centre ball is an interval.
    CHECK(gaussian_measure(ConvexSet::ball(vec({0.7}), 0.4)) ==
          Approx(normal_cdf(1.1) - normal_cdf(0.3)).epsilon(1e-10));
}

TEST_CASE("off-centre balls agree with Monte Carlo") {
    const auto C = ConvexSet::ball(vec({0.8, -0.5, 0.3}), 1.3);
    const auto Z = gaussian_samples(200000, 3, 17);
    const auto e = empirical_measure(Z, C);
    CHECK(std::abs(e.p - gaussian_measure(C)) <= 3.0 * e.se);
}

TEST_CASE("gaussian measure is monotone under inflation") {
    const auto fam = ConvexFamily::generate(FamilySpec{}, 2);
    for (const auto& C : fam.sets()) {
        for (double eps : {0.01, 0.3}) {
            CHECK(gaussian_measure(C.inflated(eps)) >= gaussian_measure(C));
        }
    }
}

TEST_CASE("empirical_measure") {
    Eigen::MatrixXd inside = Eigen::MatrixXd::Zero(10, 2);
    const auto all = empirical_measure(inside, ConvexSet::ball(vec({0.0, 0.0}), 1.0));
    CHECK(all.p == 1.0);
    CHECK(all.se == 0.0);
    CHECK_THROWS_AS(empirical_measure(Eigen::MatrixXd(0, 2), ConvexSet::ball(vec({0.0, 0.0}), 1.0)), DomainError);
    const auto Z = gaussian_samples(50000, 2, 5);
    const auto box = ConvexSet::box(vec({-0.5, -1.0}), vec({1.0, 0.2}));
    const auto e = empirical_measure(Z, box);
    CHECK(std::abs(e.p - gaussian_measure(box)) <= 3.0 * e.se);
}

TEST_CASE("dc_estimate null and shifted cases") {
    const std::size_t d = 2;
    const auto Z = gaussian_samples(100000, d, 11);
    const auto fam = ConvexFamily::generate(FamilySpec{}, d, &Z);
    const auto null = dc_estimate(Z, fam);
    CHECK(null.value <= 3.0 * null.max_se);
    CHECK(null.rows.size() == fam.size());

    const Eigen::VectorXd theta = vec({0.3, 0.0});
    const auto shifted = gaussian_samples(100000, d, 12, theta);
    const auto fam2 = ConvexFamily::generate(FamilySpec{}, d, &shifted);
    const auto est = dc_estimate(shifted, fam2);
    CHECK(est.value >= 2.0 * normal_cdf(theta.norm() / 2.0) - 1.0 - 3.0 * est.se);

    const ConvexFamily one({ConvexSet::half_space(vec({1.0, 0.0}), 0.2)});
    const auto single = dc_estimate(shifted, one);
    CHECK(single.value ==
          Approx(std::abs(empirical_measure(shifted, one.set(0)).p - normal_cdf(0.2))).epsilon(1e-15));

    // Supersets never lower the estimate.
    std::vector<ConvexSet> sub(fam2.sets().begin(), fam2.sets().begin() + 50);
    CHECK(dc_estimate(shifted, ConvexFamily(sub)).value <= est.value);

    CHECK(dc_estimate(shifted, fam2, 3).value == est.value);
}

TEST_CASE("family generation is reproducible") {
    FamilySpec spec;
    spec.seed = 42;
    const auto a = ConvexFamily::generate(spec, 3);
    const auto b = ConvexFamily::generate(spec, 3);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == spec.halfspaces + spec.balls + spec.boxes);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.set(i).describe() == b.set(i).describe());
    }
    for (const auto& v : direction_set(3, 64, 1)) {
        CHECK(v.norm() == Approx(1.0));
    }
}

TEST_CASE("shell bound closed-form oracles") {
    const ConvexFamily half({ConvexSet::half_space(vec({1.0}), 0.0)});
    const auto h = shell_bound_check(half, 0.1, 200000, 3);
    REQUIRE(h.rows.size() == 1);
    REQUIRE(h.rows[0].outer_exact);
    CHECK(*h.rows[0].outer_exact == Approx(normal_cdf(0.1) - 0.5).epsilon(1e-12));
    CHECK(*h.rows[0].outer_exact == Approx(0.0398).epsilon(1e-2));
    CHECK(std::abs(h.rows[0].outer - *h.rows[0].outer_exact) <= 3.0 * h.rows[0].outer_se);
    CHECK(h.pass());
    CHECK(h.bound == Approx(0.4));

    const ConvexFamily ball({ConvexSet::ball(vec({0.0, 0.0}), 1.0)});
    const auto b = shell_bound_check(ball, 0.05, 200000, 4);
    const double exact = std::exp(-0.5) - std::exp(-1.05 * 1.05 / 2.0);
    CHECK(*b.rows[0].outer_exact == Approx(exact).epsilon(1e-10));
    CHECK(std::abs(b.rows[0].outer - exact) <= 3.0 * b.rows[0].outer_se);
    CHECK(b.bound == Approx(4.0 * std::pow(2.0, 0.25) * 0.05));
    CHECK(b.pass());

    const auto tiny = shell_bound_check(ball, 1e-6, 20000, 4);
    CHECK(tiny.rows[0].outer < 1e-3);
    CHECK(tiny.rows[0].inner < 1e-3);
}

TEST_CASE("smoothing bound holds for shifted and Gaussian clouds") {
    const auto shifted = gaussian_samples(40000, 2, 21, vec({0.2, -0.1}));
    const auto fam = ConvexFamily::generate(FamilySpec{}, 2, &shifted);
    for (double eps : {0.05, 0.2}) {
        const auto rep = smoothing_bound_check(shifted, fam, eps);
        CHECK(rep.pass);
        CHECK(rep.dc <= rep.bound);
    }
}
