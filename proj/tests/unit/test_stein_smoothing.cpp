#include <cmath>
#include <numbers>

#include "doctest.h"
#include "seqclt/convex.hpp"
#include "seqclt/decomposition.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/quadrature.hpp"
#include "seqclt/rng.hpp"
#include "seqclt/smoothing.hpp"
#include "seqclt/stein.hpp"

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

Eigen::VectorXd normal_vector(Rng& rng, std::size_t d, double scale = 1.0) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = scale * rng.normal();
    }
    return v;
}

ConvexSet random_set(Rng& rng, std::size_t d) {
    switch (rng.below(3)) {
        case 0: {
            Eigen::VectorXd a = normal_vector(rng, d);
            return ConvexSet::half_space(a / a.norm(), rng.normal());
        }
        case 1:
            return ConvexSet::ball(normal_vector(rng, d), 0.2 + 2.0 * rng.uniform());
        default: {
            Eigen::VectorXd c = normal_vector(rng, d);
            Eigen::VectorXd w(static_cast<Eigen::Index>(d));
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                w(i) = 0.1 + 1.5 * rng.uniform();
            }
            return ConvexSet::box(c - w, c + w);
        }
    }
}

}  // namespace

TEST_CASE("smoothing_psi pieces") {
    CHECK(smoothing_psi(-1.0) == 1.0);
    CHECK(smoothing_psi(0.0) == 1.0);
    CHECK(smoothing_psi(0.25) == Approx(0.875));
    CHECK(smoothing_psi(0.75) == Approx(0.125));
    CHECK(smoothing_psi(1.0) == 0.0);
    CHECK(smoothing_psi(3.0) == 0.0);
    // C^1 at the joins.
    for (double x : {0.0, 0.5, 1.0}) {
        CHECK(smoothing_psi(x - 1e-9) == Approx(smoothing_psi(x + 1e-9)).epsilon(1e-8));
        CHECK(smoothing_psi_prime(x - 1e-9) == Approx(smoothing_psi_prime(x + 1e-9)).epsilon(1e-6));
    }
}

TEST_CASE("smoothed indicator values") {
    const auto ball = ConvexSet::ball(vec({0.0, 0.0}), 1.0);
    CHECK(smoothed_indicator(ball, 0.2, vec({0.3, 0.1})) == 1.0);
    CHECK(smoothed_indicator(ball, 0.5, vec({1.5, 0.0})) == 0.0);
    CHECK(smoothed_indicator(ball, 0.2, vec({1.3, 0.0})) == 0.0);
    CHECK(smoothed_indicator(ball, 0.2, vec({1.05, 0.0})) == Approx(0.875));
}

TEST_CASE("smoothed indicator properties on random sets and points") {
    Rng rng(20240611);
    std::size_t checks = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t d = 1 + rng.below(3);
        const ConvexSet C = random_set(rng, d);
        const double eps = 0.02 + 0.8 * rng.uniform();
        const Eigen::VectorXd x = normal_vector(rng, d, 2.0);
        const Eigen::VectorXd y = x + normal_vector(rng, d, eps * rng.uniform());
        const double hx = smoothed_indicator(C, eps, x);
        const double dist = C.dist(x);
        if (dist == 0.0) {
            REQUIRE(hx == 1.0);
        }
        if (dist > eps) {
            REQUIRE(hx == 0.0);
        }
        REQUIRE(hx >= 0.0);
        REQUIRE(hx <= 1.0);
        const Eigen::VectorXd gx = smoothed_indicator_gradient(C, eps, x);
        const Eigen::VectorXd gy = smoothed_indicator_gradient(C, eps, y);
        REQUIRE(gx.norm() <= 2.0 / eps * (1.0 + 1e-12));
        REQUIRE((gx - gy).norm() <= 8.0 / (eps * eps) * (x - y).norm() * (1.0 + 1e-9) + 1e-12);
        ++checks;
    }
    CHECK(checks == 10000);
}

TEST_CASE("gaussian rules integrate low-degree polynomials") {
    const auto tau = tau_rule();
    double s = 0.0;
    for (double w : tau.weights) {
        s += w;
    }
    CHECK(s == Approx(1.0).epsilon(1e-12));
    const auto gh = tensor_gauss_hermite(2, 24);
    double m4 = 0.0;
    double m5 = 0.0;
    for (std::size_t i = 0; i < gh.size(); ++i) {
        m4 += gh.weights(static_cast<Eigen::Index>(i)) * std::pow(gh.points(static_cast<Eigen::Index>(i), 0), 4);
        m5 += gh.weights(static_cast<Eigen::Index>(i)) * std::pow(gh.points(static_cast<Eigen::Index>(i), 1), 5);
    }
    CHECK(m4 == Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(m5) < 1e-12);
    CHECK_THROWS_AS(quasi_random_gaussian(17, 16), DomainError);
}

TEST_CASE("stein_g closed forms") {
    const auto quad = SteinQuadrature::defaults(2);
    const CallableTestFunction constant(2, [](const Eigen::VectorXd&) { return 0.7; });
    CHECK(std::abs(stein_g(constant, vec({0.4, -1.0}), 0.3, quad).value) < 1e-14);

    const LinearTestFunction lin(vec({1.0, 0.0}));
    for (double tau : {0.1, 0.5, 0.9}) {
        CHECK(stein_g(lin, vec({0.8, 0.2}), tau, quad).value == Approx(-0.8 / (2.0 * std::sqrt(1.0 - tau))));
    }

    for (std::size_t d : {1, 2, 3}) {
        const auto q = SteinQuadrature::defaults(d);
        const CallableTestFunction sq(d, [](const Eigen::VectorXd& x) { return std::min(x.squaredNorm(), 1e6); });
        CHECK(stein_g(sq, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)), 0.4, q).value ==
              Approx(static_cast<double>(d) / 2.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(stein_g(lin, vec({0.0, 0.0}), 1.0, quad), DomainError);
    CHECK_THROWS_AS(stein_g(lin, vec({0.0, 0.0}), 0.0, quad), DomainError);
}

TEST_CASE("stein_g_derivs") {
    const auto quad = SteinQuadrature::defaults(2);
    const CallableTestFunction constant(2, [](const Eigen::VectorXd&) { return 1.0; });
    const auto z = stein_g_derivs(constant, vec({0.3, 0.1}), 0.4, quad);
    CHECK(z.g_rs.cwiseAbs().maxCoeff() < 1e-12);
    for (double v : z.g_rst) {
        CHECK(std::abs(v) < 1e-12);
    }

    const auto q1 = SteinQuadrature::defaults(1);
    const CallableTestFunction window(1, [](const Eigen::VectorXd& x) { return std::clamp(x(0), -30.0, 30.0); });
    CHECK(std::abs(stein_g_derivs(window, vec({0.5}), 0.3, q1).g_rs(0, 0)) < 1e-8);

    const SmoothedIndicatorFunction h(ConvexSet::ball(vec({0.2, -0.1}), 1.0), 0.3);
    const auto dv = stein_g_derivs(h, vec({0.5, 0.3}), 0.35, quad);
    CHECK(std::abs(dv.g_rs(0, 1) - dv.g_rs(1, 0)) < 1e-6);
    CHECK(std::abs(dv.rst(0, 0, 1) - dv.rst(0, 1, 0)) < 1e-6);
    CHECK(std::abs(dv.rst(0, 0, 1) - dv.rst(1, 0, 0)) < 1e-6);

}

TEST_CASE("stein_g_derivs agree with finite differences of g") {
    const auto q2 = SteinQuadrature::defaults(2);
    const auto q1 = SteinQuadrature::defaults(1);
    const SmoothedIndicatorFunction half(ConvexSet::half_space(vec({0.6, 0.8}), 0.2), 0.3);
    const SmoothedIndicatorFunction box(ConvexSet::box(vec({-0.4}), vec({0.9})), 0.25);
    const double step = 1e-3;
    const double tau = 0.35;
    for (const auto& [h, quad, w] : {std::tuple<const TestFunction*, const SteinQuadrature*, Eigen::VectorXd>{
                                         &half, &q2, vec({0.5, 0.3})},
                                     {&box, &q1, vec({0.7})}}) {
        const auto dv = stein_g_derivs(*h, w, tau, *quad);
        const std::size_t d = h->dim();
        for (std::size_t r = 0; r < d; ++r) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
            e(static_cast<Eigen::Index>(r)) = step;
            const double fd2 = (stein_g(*h, w + e, tau, *quad).value - 2.0 * stein_g(*h, w, tau, *quad).value +
                                stein_g(*h, w - e, tau, *quad).value) /
                               (step * step);
            CHECK(fd2 == Approx(dv.g_rs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r))).epsilon(1e-4));
            const double fd3 = (stein_g_derivs(*h, w + e, tau, *quad).g_rs(0, 0) -
                                stein_g_derivs(*h, w - e, tau, *quad).g_rs(0, 0)) /
                               (2.0 * step);
            CHECK(fd3 == Approx(dv.rst(0, 0, r)).epsilon(1e-4));
        }
    }
}

TEST_CASE("stein_solution and residual") {
    for (std::size_t d : {1, 2, 3}) {
        const auto quad = SteinQuadrature::defaults(d);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        a(0) = 1.0;
        const LinearTestFunction lin(a);
        Rng rng(d);
        const Eigen::VectorXd w = normal_vector(rng, d);
        CHECK(stein_solution(lin, w, quad).value == Approx(-w(0)).epsilon(1e-10));
        CHECK(stein_residual(lin, w, quad).residual <= 1e-6);
    }
    const auto q2 = SteinQuadrature::defaults(2);
    const CallableTestFunction constant(2, [](const Eigen::VectorXd&) { return 2.0; });
    CHECK(std::abs(stein_solution(constant, vec({0.1, 0.9}), q2).value) < 1e-14);
    CHECK(stein_residual(constant, vec({0.1, 0.9}), q2).residual < 1e-12);

    const SmoothedIndicatorFunction ball(ConvexSet::ball(vec({0.0, 0.0}), 1.0), 0.3);
    const auto r = stein_residual(ball, vec({0.5, 0.0}), q2);
    CHECK(r.residual <= 1e-3);
    CHECK_FALSE(r.flagged);
}

TEST_CASE("stein solution is linear in h") {
    const auto quad = SteinQuadrature::defaults(2);
    const SmoothedIndicatorFunction h1(ConvexSet::ball(vec({0.0, 0.5}), 1.2), 0.2);
    const SmoothedIndicatorFunction h2(ConvexSet::half_space(vec({0.6, 0.8}), 0.1), 0.3);
    const CallableTestFunction mix(2, [&](const Eigen::VectorXd& x) { return 2.0 * h1(x) - 0.5 * h2(x); });
    const Eigen::VectorXd w = vec({0.3, -0.7});
    const auto f1 = stein_solution(h1, w, quad);
    const auto f2 = stein_solution(h2, w, quad);
    const auto fm = stein_solution(mix, w, quad);
    CHECK(std::abs(fm.value - (2.0 * f1.value - 0.5 * f2.value)) <= 3e-4 + fm.error);
}

TEST_CASE("semi-analytic expectations match a dense midpoint grid") {
    const GaussianRule rule = tensor_gauss_hermite(2, 24);
    const Eigen::VectorXd mean = vec({0.2, 0.1});
    const double scale = 0.7;
    for (const auto& C : {ConvexSet::ball(vec({0.3, -0.2}), 0.8), ConvexSet::half_space(vec({0.6, -0.8}), 0.4),
                          ConvexSet::box(vec({-1.0, -0.5}), vec({0.5, 1.5}))}) {
        const SmoothedIndicatorFunction h(C, 0.4);
        CHECK(h.exact_expectation());
        const int n = 2000;
        const double L = 8.0;
        const double dz = 2.0 * L / n;
        double sum = 0.0;
        Eigen::VectorXd x(2);
        for (int i = 0; i < n; ++i) {
            const double z1 = -L + (i + 0.5) * dz;
            for (int j = 0; j < n; ++j) {
                const double z2 = -L + (j + 0.5) * dz;
                x << mean(0) + scale * z1, mean(1) + scale * z2;
                sum += h(x) * std::exp(-0.5 * (z1 * z1 + z2 * z2));
            }
        }
        const double grid = sum * dz * dz / (2.0 * std::numbers::pi);
        CHECK(h.gaussian_expectation(mean, scale, rule) == Approx(grid).epsilon(1e-6));
    }
}

TEST_CASE("gauss_third_deriv_functional") {
    const auto q1 = SteinQuadrature::defaults(1);
    const CallableTestFunction constant(1, [](const Eigen::VectorXd&) { return 1.0; });
    CHECK(std::abs(gauss_third_deriv_functional(constant, 0.5, q1)[0]) < 1e-12);

    const SmoothedIndicatorFunction h(ConvexSet::half_space(vec({1.0}), 0.3), 0.2);
    CHECK(std::abs(gauss_third_deriv_functional(h, 1.0 - 1e-12, q1)[0]) < 1e-5);

    // Average of g_rst(Z, tau) over Z ~ N(0,1).
    const double tau = 0.4;
    const double target = gauss_third_deriv_functional(h, tau, q1)[0];
    Rng rng(99);
    const std::size_t n = 4000;
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = stein_g_derivs(h, vec({rng.normal()}), tau, q1).g_rst[0];
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - target) <= 3.0 * se);

    for (std::size_t d : {1, 2}) {
        const auto q = SteinQuadrature::defaults(d);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        a(0) = 1.0;
        for (double eps : {0.01, 0.05, 0.1, 0.5}) {
            for (double t : {0.1, 0.5, 0.9}) {
                const SmoothedIndicatorFunction hb(ConvexSet::ball(a * 0.3, 1.0), eps);
                const auto v = gauss_third_deriv_functional(hb, t, q);
                double worst = 0.0;
                for (double x : v) {
                    worst = std::max(worst, std::abs(x));
                }
                CHECK(worst <= std::sqrt(1.0 - t) / 2.0 * third_deriv_abs_integral(d) + 1e-9);
            }
        }
    }
}

TEST_CASE("punctured sums") {
    Rng rng(3);
    const std::size_t N = 6;
    const std::size_t d = 2;
    Eigen::MatrixXd Y(4, static_cast<Eigen::Index>(N * d));
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
        Y.data()[i] = rng.normal();
    }
    const PuncturedSums ps(Y, N, d);
    for (std::size_t s = 0; s < ps.samples(); ++s) {
        for (std::size_t n = 0; n < N; ++n) {
            CHECK((ps.W_punctured(s, n, -1) - ps.W(s)).norm() == 0.0);
            CHECK(ps.W_punctured(s, n, static_cast<long>(N) - 1).norm() == 0.0);
            Eigen::VectorXd acc = ps.W_punctured(s, n, static_cast<long>(N) - 1);
            for (std::size_t m = 0; m < N; ++m) {
                CHECK((ps.W_punctured(s, n, static_cast<long>(m) - 1) - ps.W_punctured(s, n, static_cast<long>(m)) -
                       ps.Y_ring(s, n, m))
                          .norm() < 1e-14);
                acc += ps.Y_ring(s, n, m);
            }
            CHECK((acc - ps.W(s)).norm() < 1e-13);
        }
    }
}

TEST_CASE("Chebyshev interpolant") {
    const ChebyshevInterpolant c([](double x) { return std::sin(x); }, -3.0, 3.0, 40);
    CHECK(c(1.1) == Approx(std::sin(1.1)).epsilon(1e-13));
    CHECK(c.tail() < 1e-14);
    CHECK_THROWS_AS(c(3.5), DomainError);
}

TEST_CASE("E_i decomposition with zero observables") {
    const PuncturedSums zero(Eigen::MatrixXd::Zero(50, 8), 8, 1);
    const FdDerivatives f([](const Eigen::VectorXd& w) { return std::sin(w(0)) + 0.3 * w(0) * w(0); });
    const auto rep = ei_decomposition(f, zero);
    for (double e : rep.E) {
        CHECK(std::abs(e) < 1e-15);
    }
    CHECK(rep.algebraic_gap < 1e-12);
}

TEST_CASE("E_i decomposition at N = 1 reduces to the hand expansion") {
    Rng rng(5);
    const std::size_t M = 2000;
    Eigen::MatrixXd Y(M, 1);
    for (std::size_t s = 0; s < M; ++s) {
        Y(static_cast<Eigen::Index>(s), 0) = rng.normal();
    }
    const PuncturedSums ps(Y, 1, 1);
    const FdDerivatives f([](const Eigen::VectorXd& w) { return std::sin(w(0)) + 0.1 * std::pow(w(0), 3); });
    const auto rep = ei_decomposition(f, ps);

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    const double g0 = f.gradient(zero)(0);
    const double h0 = f.hessian(zero)(0, 0);
    double mw2 = 0.0;
    double mwg = 0.0;
    double mh = 0.0;
    for (std::size_t s = 0; s < M; ++s) {
        const Eigen::VectorXd w = ps.W(s);
        mw2 += w(0) * w(0);
        mwg += w(0) * (f.gradient(w)(0) - g0);
        mh += f.hessian(w)(0, 0);
    }
    mw2 /= M;
    mwg /= M;
    mh /= M;
    CHECK(std::abs(rep.E[1] - (-mwg + mw2 * h0)) < 1e-7);
    CHECK(std::abs(rep.E[6] - mw2 * (mh - h0)) < 1e-7);
    CHECK(std::abs(rep.defect) < 1e-6);
    for (std::size_t i : {0, 2, 3, 4, 5}) {
        CHECK(std::abs(rep.E[i]) < 1e-12);
    }
    CHECK(rep.algebraic_gap < 1e-10);
}

TEST_CASE("E_i algebra closes on random summands") {
    Rng rng(8);
    const std::size_t N = 4;
    const std::size_t d = 2;
    const std::size_t M = 300;
    Eigen::MatrixXd Y(M, static_cast<Eigen::Index>(N * d));
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
        Y.data()[i] = 0.5 * rng.normal();
    }
    const PuncturedSums ps(Y, N, d);
    const FdDerivatives f([](const Eigen::VectorXd& w) { return std::cos(w(0) - 0.5 * w(1)) + 0.2 * w(0) * w(1); });
    const auto one = ei_decomposition(f, ps, 1);
    const auto many = ei_decomposition(f, ps, 3);
    CHECK(one.algebraic_gap < 1e-10);
    CHECK(one.total == many.total);
    CHECK(one.lhs == many.lhs);
}
