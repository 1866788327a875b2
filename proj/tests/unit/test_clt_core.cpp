#include <cmath>
#include <numbers>

#include "doctest.h"
#include "seqclt/covariance.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/growth_check.hpp"
#include "seqclt/observable.hpp"
#include "seqclt/orbit.hpp"
#include "seqclt/sampling.hpp"
#include "seqclt/transfer.hpp"

using namespace seqclt;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

VectorObservable obs(std::vector<std::string> comps) {
    std::vector<ObservableComponent> c;
    for (const auto& s : comps) {
        c.push_back(parse_component(s));
    }
    return VectorObservable(std::move(c));
}

SequentialSchedule doubling() { return single_map_schedule(make_affine(2)); }

SequentialSchedule perturbed_cycle() {
    const Atlas atlas{{"c0", make_perturbed(0.0)}, {"c05", make_perturbed(0.05)}, {"c1", make_perturbed(0.1)}};
    return SequentialSchedule(CyclicRule{{"c05", "c1", "c0"}}, atlas, 1, 2.0 - 0.2 * kPi);
}

}  // namespace

TEST_CASE("parse_component") {
    CHECK(parse_component("cos:1")(0.25) == Approx(0.0).epsilon(1e-15));
    CHECK(parse_component("0.3*cos:2")(0.0) == Approx(0.3));
    CHECK(parse_component("sin:2")(0.125) == Approx(1.0));
    CHECK(parse_component("const:2.5")(0.7) == 2.5);
    CHECK(parse_component("zero")(0.3) == 0.0);
    CHECK_THROWS_AS(parse_component("tan:1"), ConfigError);
    CHECK(obs({"cos:1", "sin:2"}).L() >= 1.0);
}

TEST_CASE("center_observable") {
    const std::size_t G = 2048;
    const auto mu = GridDensity::uniform(G);
    const TransferChain dbl(doubling(), G);
    const auto constant = center_observable(obs({"const:3"}), dbl, 4, mu);
    CHECK(std::abs(constant.eval(0, 0.37)) < 1e-10);

    const auto c = center_observable(obs({"cos:1"}), dbl, 5, mu);
    CHECK(c.eval(0, 0.2) == Approx(std::cos(0.4 * kPi)).epsilon(1e-10));
    CHECK(c.L() >= obs({"cos:1"}).L());
    CHECK(c.L() <= 2.0 * obs({"cos:1"}).L() + 1e-12);

    const TransferChain chain(perturbed_cycle(), G);
    const auto rho = GridDensity::normalized([](double x) { return std::exp(std::cos(2 * kPi * x)); }, G);
    const auto centred = center_observable(obs({"cos:1", "sin:2"}), chain, 3, rho);
    const auto pushed = chain.compose(1, 3, rho.function());
    for (std::size_t r = 0; r < 2; ++r) {
        const auto g = GridFunction::from([&](double x) { return centred.eval(r, x); }, G);
        CHECK(std::abs(inner(g, pushed)) < 1e-8);
    }

    const auto seq = center_sequence(obs({"cos:1", "sin:2"}), chain, 6, rho);
    CHECK(seq.length() == 6);
    CHECK((seq.offsets[3] - centred.offset()).norm() < 1e-12);
}

TEST_CASE("birkhoff_sum") {
    const auto seq = constant_sequence(obs({"cos:1"}), 4);
    CHECK(birkhoff_sum(doubling(), seq, 0.5, 0.5, 4, 0.1).norm() == 0.0);
    const auto two = constant_sequence(obs({"cos:1"}), 2);
    // n = 0 contributes phi(x) and n = 1 contributes phi(T x).
    CHECK(birkhoff_sum(doubling(), two, 0.0, 1.0, 2, 0.1)(0) ==
          Approx(std::cos(0.2 * kPi) + std::cos(0.4 * kPi)).epsilon(1e-12));

    const auto sched = perturbed_cycle();
    const auto s8 = constant_sequence(obs({"cos:1", "sin:2"}), 8);
    const Eigen::VectorXd full = birkhoff_sum(sched, s8, 0.0, 1.0, 8, 0.3141);
    const Eigen::VectorXd halves = birkhoff_sum(sched, s8, 0.0, 0.5, 8, 0.3141) + birkhoff_sum(sched, s8, 0.5, 1.0, 8, 0.3141);
    CHECK((full - halves).norm() < 1e-12);

    const auto w = window_indices(0.25, 0.75, 10);
    CHECK(w.first == 3);
    CHECK(w.last == 8);
    CHECK_THROWS_AS(window_indices(0.6, 0.5, 10), DomainError);
}

TEST_CASE("simulated segment sums agree with the orbit pass") {
    const auto sched = perturbed_cycle();
    const auto mu = GridDensity::uniform(1024);
    const auto seq = constant_sequence(obs({"cos:1"}), 8);
    const auto sums = simulate_segments(sched, seq, mu, {0, 4, 8}, 64, 11);
    const auto full = sums.window_matrix(0, 8);
    const auto a = sums.window_matrix(0, 4);
    const auto b = sums.window_matrix(4, 8);
    CHECK((full - a - b).norm() < 1e-12);
    CHECK_THROWS_AS(sums.window_matrix(0, 3), DomainError);
}

TEST_CASE("sample_mu") {
    const auto mu = GridDensity::uniform(1024);
    const std::size_t M = 100000;
    const auto pts = sample_mu(mu, M, 7);
    REQUIRE(pts.size() == M);
    CHECK(ks_statistic(pts, mu) <= 1.63 / std::sqrt(static_cast<double>(M)));
    CHECK(sample_mu(mu, M, 7, 3) == pts);
    CHECK(sample_mu(mu, 1000, 8) != sample_mu(mu, 1000, 9));
    CHECK_THROWS_AS(sample_mu(mu, 0, 1), DomainError);

    const auto rho = GridDensity::normalized([](double x) { return std::exp(std::cos(2 * kPi * x)); }, 1024);
    CHECK(ks_statistic(sample_mu(rho, 50000, 3), rho) <= 1.63 / std::sqrt(50000.0));
    CHECK_THROWS_AS(GridDensity::normalized([](double) { return 0.0; }, 64), DomainError);
}

TEST_CASE("covariance_matrix oracles") {
    const auto mu = GridDensity::uniform(2048);
    const std::size_t N = 16;
    const auto zero = covariance_matrix(doubling(), constant_sequence(obs({"zero"}), N), 0.0, 1.0, N, mu, 1000, 1);
    CHECK(zero.Sigma.norm() == 0.0);
    CHECK_FALSE(zero.invertible);

    const auto c1 = covariance_matrix(doubling(), constant_sequence(obs({"cos:1"}), N), 0.0, 1.0, N, mu, 40000, 2);
    CHECK(std::abs(c1.Sigma(0, 0) - N / 2.0) <= 3.0 * c1.se(0, 0));
    CHECK(c1.invertible);

    const auto c2 =
        covariance_matrix(doubling(), constant_sequence(obs({"cos:1", "sin:2"}), N), 0.0, 1.0, N, mu, 40000, 3);
    CHECK(std::abs(c2.Sigma(0, 1)) <= 3.0 * c2.se(0, 1));
    CHECK((c2.Sigma - c2.Sigma.transpose()).norm() < 1e-10);
    const Eigen::MatrixXd I = c2.inv_sqrt * c2.Sigma * c2.inv_sqrt;
    CHECK((I - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-6);

    const auto w = normalize_samples(simulate_segments(doubling(), constant_sequence(obs({"cos:1", "sin:2"}), N), mu,
                                                       {0, N}, 40000, 3)
                                         .window_matrix(0, N),
                                     c2.inv_sqrt);
    const Eigen::MatrixXd second = w.transpose() * w / static_cast<double>(w.rows());
    CHECK((second - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("scaling equivariance of the normalisation") {
    const auto mu = GridDensity::uniform(1024);
    const auto sched = perturbed_cycle();
    const std::size_t N = 12;
    const auto phi = obs({"cos:1", "sin:2"});
    const auto s1 = simulate_segments(sched, constant_sequence(phi, N), mu, {0, N}, 5000, 4).window_matrix(0, N);
    const auto s2 =
        simulate_segments(sched, constant_sequence(phi.scaled(2.0), N), mu, {0, N}, 5000, 4).window_matrix(0, N);
    CHECK((s2 - 2.0 * s1).cwiseAbs().maxCoeff() == 0.0);
    const auto c1 = covariance_from_samples(s1, 0.0, 1.0, N);
    const auto c2 = covariance_from_samples(s2, 0.0, 1.0, N);
    CHECK((normalize_samples(s1, c1.inv_sqrt) - normalize_samples(s2, c2.inv_sqrt)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("correlation-sum covariance matches Monte Carlo") {
    const std::size_t G = 2048;
    const auto sched = perturbed_cycle();
    const TransferChain chain(sched, G);
    const auto mu = GridDensity::uniform(G);
    const std::size_t N = 6;
    const auto phi = obs({"cos:1"});
    const auto seq = center_sequence(phi, chain, N, mu);
    const auto oracle = correlation_sum_covariance(chain, phi, 0.0, 1.0, N, mu);
    const auto mc = covariance_matrix(sched, seq, 0.0, 1.0, N, mu, 100000, 5);
    CHECK(std::abs(oracle(0, 0) - mc.Sigma(0, 0)) <= 4.0 * mc.se(0, 0));
}

TEST_CASE("inv_sqrt") {
    CHECK((inv_sqrt(Eigen::MatrixXd::Identity(3, 3), 1e-10) - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
    Eigen::MatrixXd d(2, 2);
    d << 4, 0, 0, 9;
    const auto r = inv_sqrt(d, 1e-10);
    CHECK(r(0, 0) == Approx(0.5));
    CHECK(r(1, 1) == Approx(1.0 / 3.0));
    CHECK(std::abs(r(0, 1)) < 1e-15);
    Eigen::MatrixXd s(2, 2);
    s << 1, 0, 0, 1e-14;
    CHECK_THROWS_AS(inv_sqrt(s, 1e-10), SingularCovarianceError);
}

TEST_CASE("check_c1_c2") {
    const auto mu = GridDensity::uniform(1024);
    const std::size_t N = 64;
    const auto triples = dyadic_triples(4);
    const auto breaks = triple_breakpoints(triples, N);
    const auto sums = simulate_segments(doubling(), constant_sequence(obs({"cos:1"}), N), mu, breaks, 40000, 6);
    const auto rep = check_c1_c2(sums, N, triples);
    CHECK(rep.pass());
    CHECK(rep.skipped > 0);
    CHECK(rep.C0_fit >= 1.0 - 0.1);
    CHECK(rep.C0_fit <= 2.3);
    bool saw_skip = false;
    for (const auto& t : rep.triples) {
        if (t.triple.delta1 == t.triple.delta2) {
            CHECK(t.skipped);
            saw_skip = true;
        }
    }
    CHECK(saw_skip);

    auto seq = constant_sequence(obs({"cos:1"}), N);
    seq.scale.assign(N, 1.0);
    for (std::size_t n = 0; n < N / 2; ++n) {
        seq.scale[n] = 0.0;
    }
    const auto dead = check_c1_c2(simulate_segments(doubling(), seq, mu, breaks, 2000, 7), N, triples);
    CHECK_FALSE(dead.pass());
    CHECK(dead.failed > 0);
    CHECK(std::isinf(dead.C0_fit));
}
