#include <cmath>
#include <numbers>

#include "doctest.h"
#include "seqclt/base_process.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/quenched.hpp"
#include "seqclt/rate.hpp"
#include "seqclt/rng.hpp"

using namespace seqclt;
using doctest::Approx;

namespace {

VectorObservable obs(std::vector<std::string> comps) {
    std::vector<ObservableComponent> c;
    for (const auto& s : comps) {
        c.push_back(parse_component(s));
    }
    return VectorObservable(std::move(c));
}

Atlas atlas() {
    return {{"doubling", make_affine(2)}, {"c0", make_perturbed(0.0)}, {"c0.1", make_perturbed(0.1)},
            {"tripling", make_affine(3)}};
}

BaseProcess markov_pair() {
    Eigen::MatrixXd P(2, 2);
    P << 0.7, 0.3, 0.4, 0.6;
    return BaseProcess({"c0", "c0.1"}, MarkovBase{P, Eigen::Vector2d(0.5, 0.5)});
}

}  // namespace

TEST_CASE("base process validation") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.6, 0.5, 0.5;
    CHECK_THROWS_AS(BaseProcess({"c0", "c0.1"}, MarkovBase{bad, Eigen::Vector2d(1.0, 0.0)}), ConfigError);
    CHECK_THROWS_AS(BaseProcess({"c0", "c0.1"}, IidBase{{0.5, -0.5}}), ConfigError);
    CHECK_THROWS_AS(BaseProcess({"c0", "c0.1"}, IidBase{{0.5}}), ConfigError);
    const auto m = markov_pair();
    CHECK(m.primitive());
    CHECK(m.spectral_gap() == Approx(0.7));
    CHECK(m.stationary()(0) == Approx(4.0 / 7.0));
    CHECK(BaseProcess({"c0"}, IidBase{{1.0}}).spectral_gap() == Approx(1.0));
}

TEST_CASE("sample_omega") {
    const BaseProcess absorbing({"c0", "c0.1"}, MarkovBase{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 0.0)});
    for (std::size_t w : absorbing.sample_omega(100, 3)) {
        CHECK(w == 0);
    }
    CHECK_FALSE(absorbing.primitive());

    const BaseProcess iid({"c0", "c0.1", "doubling"}, IidBase{{1.0 / 3, 1.0 / 3, 1.0 / 3}});
    const std::size_t N = 100000;
    const auto om = iid.sample_omega(N, 9);
    std::array<double, 3> freq{};
    for (std::size_t w : om) {
        freq[w] += 1.0 / N;
    }
    for (double f : freq) {
        CHECK(std::abs(f - 1.0 / 3.0) <= 3.0 * std::sqrt(2.0 / 9.0 / N));
    }
    CHECK(iid.sample_omega(N, 9) == om);
    const auto prefix = iid.sample_omega(1000, 9);
    CHECK(std::equal(prefix.begin(), prefix.end(), om.begin()));
    CHECK_THROWS_AS(iid.sample_omega(0, 9), DomainError);

    const auto m = markov_pair();
    const auto mo = m.sample_omega(200000, 4);
    double frac0 = 0.0;
    for (std::size_t w : mo) {
        frac0 += (w == 0) ? 1.0 / mo.size() : 0.0;
    }
    CHECK(frac0 == Approx(4.0 / 7.0).epsilon(0.02));
}

TEST_CASE("fit_rate") {
    std::vector<double> Ns, dcs, ses;
    for (int k = 7; k <= 13; ++k) {
        const double N = std::ldexp(1.0, k);
        Ns.push_back(N);
        dcs.push_back(1.0 / std::sqrt(N));
        ses.push_back(0.05 / std::sqrt(N));
    }
    const auto exact = fit_rate(Ns, dcs, ses);
    CHECK(exact.slope == Approx(-0.5).epsilon(1e-12));
    CHECK(std::abs(exact.slope + 0.5) < 1e-12);

    Rng rng(123);
    std::size_t covered = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> noisy;
        for (double N : Ns) {
            noisy.push_back(std::pow(N, -0.5) * (1.0 + 0.05 * rng.normal()));
        }
        covered += fit_rate(Ns, noisy, ses).ci_covers(-0.5) ? 1 : 0;
    }
    CHECK(covered >= static_cast<std::size_t>(0.88 * trials));

    std::vector<double> one_noisy;
    Rng r2(7);
    for (double N : Ns) {
        one_noisy.push_back(std::pow(N, -0.5) * (1.0 + 0.05 * r2.normal()));
    }
    CHECK(fit_rate(Ns, one_noisy, ses).ci_covers(-0.5));
    CHECK_FALSE(fit_rate(Ns, one_noisy, {}).weighted);

    CHECK_THROWS_AS(fit_rate({128, 256}, {0.1, 0.07}, {0.01, 0.01}), DomainError);
    CHECK_THROWS_AS(fit_rate({128, 256, 512}, {0.1, 0.0, 0.05}, {0.01, 0.01, 0.01}), DomainError);
}

TEST_CASE("rate experiment flags singular covariances") {
    RateOptions o;
    o.Ns = {16, 32, 64};
    o.M = 2000;
    o.G = 1024;
    const auto rep = rate_experiment(single_map_schedule(make_affine(2)), obs({"zero"}), GridDensity::uniform(1024), o);
    for (const auto& p : rep.points) {
        CHECK(p.singular);
    }
    CHECK_FALSE(rep.fit);

    const BaseProcess single({"doubling"}, IidBase{{1.0}});
    CHECK_THROWS_AS(quenched_experiment(single, atlas(), obs({"zero"}), GridDensity::uniform(1024), 1, o), NumericError);
}

TEST_CASE("singleton doubling system reduces to the deterministic oracle") {
    const BaseProcess single({"doubling"}, IidBase{{1.0}});
    RateOptions o;
    o.Ns = {16, 64, 256, 1024};
    o.M = 40000;
    o.G = 1024;
    o.seed = 3;
    const auto rep = quenched_experiment(single, atlas(), obs({"cos:1"}), GridDensity::uniform(1024), 5, o);
    for (const auto& p : rep.points) {
        CHECK(std::abs(p.Sigma(0, 0) - p.N / 2.0) <= 3.0 * p.Sigma_se(0, 0));
    }
    CHECK(rep.points.front().dc > rep.points.back().dc);
    REQUIRE(rep.omega_seed);
    CHECK(*rep.omega_seed == 5);

    const auto sig = sigma_infinity_estimate(single, atlas(), obs({"cos:1"}), 256, 2, GridDensity::uniform(1024),
                                             20000, 8, 1024);
    CHECK(std::abs(sig.Sigma_inf(0, 0) - 0.5) <= 3.0 * sig.se(0, 0));
    CHECK(sig.v_proxy);
    CHECK(sig.levels == std::vector<std::size_t>{64, 128, 256});
}

TEST_CASE("degenerate observable fails the (V) proxy") {
    const auto sig = sigma_infinity_estimate(markov_pair(), atlas(), obs({"cos:1", "zero"}), 128, 2,
                                             GridDensity::uniform(1024), 5000, 2, 1024);
    CHECK_FALSE(sig.v_proxy);
    CHECK(sig.lambda_min <= 1e-6 * sig.Sigma_inf.maxCoeff());
}

TEST_CASE("quenched experiment is deterministic per seed and thread count") {
    RateOptions o;
    o.Ns = {32, 64, 128};
    o.M = 3000;
    o.G = 1024;
    o.seed = 11;
    const auto phi = obs({"cos:1", "sin:2"});
    const auto a = quenched_experiment(markov_pair(), atlas(), phi, GridDensity::uniform(1024), 77, o);
    o.threads = 3;
    const auto b = quenched_experiment(markov_pair(), atlas(), phi, GridDensity::uniform(1024), 77, o);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].dc == b.points[i].dc);
        CHECK((a.points[i].Sigma - b.points[i].Sigma).norm() == 0.0);
    }
    CHECK(a.omega == b.omega);
    CHECK(a.omega == markov_pair().sample_omega(128, 77));
}
