#include <cmath>
#include <numbers>

#include "doctest.h"
#include "seqclt/correlation.hpp"
#include "seqclt/coupling.hpp"
#include "seqclt/cylinders.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/grid.hpp"
#include "seqclt/holder.hpp"
#include "seqclt/memory_loss.hpp"
#include "seqclt/transfer.hpp"

using namespace seqclt;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const GridFunction& f) { return f.sup_norm(); }

SequentialSchedule perturbed_cycle() {
    const Atlas atlas{{"c0", make_perturbed(0.0)}, {"c05", make_perturbed(0.05)}, {"c1", make_perturbed(0.1)}};
    return SequentialSchedule(CyclicRule{{"c05", "c1", "c0"}}, atlas, 1, 2.0 - 0.2 * kPi);
}

}  // namespace

TEST_CASE("apply_transfer oracles") {
    const std::size_t G = 1024;
    const auto one = GridFunction::from([](double) { return 1.0; }, G);
    const auto p1 = apply_transfer(*make_affine(2), one);
    for (double v : p1.values()) {
        CHECK(v == Approx(1.0).epsilon(1e-14));
    }

    const auto id = GridFunction::from([](double x) { return x; }, G);
    const auto p2 = apply_transfer(*make_affine(3), id);
    for (std::size_t i = 0; i <= G; ++i) {
        CHECK(p2[i] == Approx((p2.node(i) + 1.0) / 3.0).epsilon(1e-12));
    }

    const auto c = GridFunction::from([](double x) { return std::cos(2 * kPi * x); }, G);
    CHECK(max_abs(apply_transfer(*make_affine(2), c)) < 1e-9);
    const TransferOperator exact(make_affine(2), G);
    CHECK(max_abs(exact.apply(std::function<double(double)>([](double x) { return std::cos(2 * kPi * x); }))) < 1e-13);
}

TEST_CASE("exact-preimage transfer matches interpolated transfer on smooth data") {
    const TransferOperator op(make_perturbed(0.1), 2048);
    auto f = [](double x) { return std::exp(std::sin(2 * kPi * x)); };
    const auto a = op.apply(GridFunction::from(f, 2048));
    const auto b = op.apply(std::function<double(double)>(f));
    for (std::size_t i = 0; i <= 2048; i += 64) {
        CHECK(a[i] == Approx(b[i]).epsilon(1e-8));
    }
}

TEST_CASE("compose_transfer") {
    const std::size_t G = 1024;
    const auto dbl = single_map_schedule(make_affine(2));
    const auto f = GridFunction::from([](double x) { return std::cos(4 * kPi * x); }, G);
    const auto same = compose_transfer(dbl, 3, 2, f);
    CHECK(same.values() == f.values());
    CHECK(max_abs(compose_transfer(dbl, 1, 2, f)) < 1e-8);

    const auto rho = GridDensity::normalized([](double x) { return std::exp(std::cos(2 * kPi * x)); }, G);
    const auto pushed = compose_transfer(perturbed_cycle(), 1, 7, rho.function());
    CHECK(pushed.integral() == Approx(1.0).epsilon(1e-6));
    CHECK(pushed.min() > 0.0);
}

TEST_CASE("transfer duality on the perturbed map") {
    const std::size_t G = 8192;
    const auto map = make_perturbed(0.1);
    const auto f = GridFunction::from([](double x) { return std::cos(2 * kPi * 3 * x) + 0.5; }, G);
    const auto g = [](double x) { return std::sin(2 * kPi * 5 * x); };
    const auto pf = apply_transfer(*map, f);
    const double lhs = inner(pf, GridFunction::from(g, G));
    const double rhs = inner(f, GridFunction::from([&](double x) { return g(map->eval(x)); }, G));
    CHECK(std::abs(lhs - rhs) < 1e-6);
}

TEST_CASE("log_holder_seminorm") {
    const auto flat = GridFunction::from([](double) { return 3.0; }, 512);
    CHECK(log_holder_seminorm(flat, 1.0) == 0.0);
    const auto rho = GridFunction::from([](double x) { return std::exp(std::cos(2 * kPi * x)); }, 4096);
    CHECK(log_holder_seminorm(rho, 1.0) == Approx(2 * kPi).epsilon(0.02));
    const auto zero = GridFunction::from([](double x) { return x; }, 64);
    CHECK_THROWS_AS(log_holder_seminorm(zero, 1.0), DomainError);
    CHECK_THROWS_AS(holder_seminorm(rho, 1.5), DomainError);
}

TEST_CASE("coupling_bound closed forms") {
    const auto a = coupling_bound(0.0, 2.0, 1.0, 1.0, 1);
    CHECK(a.R == Approx(0.0));
    CHECK(a.xi == Approx(0.25));
    CHECK(a.p_tilde == Approx(1.0));
    CHECK(a.q == Approx(0.75));
    CHECK(a.C_sharp == Approx(16.0 / 3.0));

    const auto b = coupling_bound(0.5, 2.0, 1.0, 1.0, 1);
    CHECK(b.R == Approx(2.0));
    CHECK(b.xi == Approx(std::exp(-2.0) / 4.0));
    CHECK(b.q == Approx(1.0 - std::exp(-2.0) / 4.0));
    CHECK(b.decay_bound(3.0) == Approx(b.C_sharp * std::pow(b.q, 3.0)));

    CHECK_THROWS_AS(coupling_bound(0.0, 1.0, 1.0, 1.0, 1), DomainError);
}

TEST_CASE("memory_loss_decay") {
    const std::size_t G = 4096;
    const TransferChain dbl(single_map_schedule(make_affine(2)), G);
    const auto u = GridFunction::from([](double x) { return 0.3 * std::cos(4 * kPi * x); }, G);
    const auto curve = memory_loss_decay(dbl, u, 4);
    REQUIRE(curve.points.size() == 5);
    CHECK(curve.points[2].norm <= 1e-8);

    const auto zero = memory_loss_decay(dbl, GridFunction(G), 3);
    for (const auto& p : zero.points) {
        CHECK(p.norm == 0.0);
    }

    const auto sched = perturbed_cycle();
    const TransferChain chain(sched, G);
    const auto ue = verify_ue(sched, 6);
    MemoryLossOptions opts;
    opts.coupling = coupling_bound(ue.K(), sched.Lambda(), 1.0, 1.0, 1);
    const auto cos1 = GridFunction::from([](double x) { return std::cos(2 * kPi * x); }, G);
    const auto pc = memory_loss_decay(chain, cos1, 25, opts);
    CHECK(pc.r_squared >= 0.95);
    CHECK(pc.q_emp < 1.0);
    CHECK(pc.q_emp <= opts.coupling->q);
    for (const auto& p : pc.points) {
        CHECK(p.norm <= p.bound);
    }

    const auto biased = GridFunction::from([](double) { return 1.0; }, G);
    CHECK_THROWS_AS(memory_loss_decay(chain, biased, 3), DomainError);
}

TEST_CASE("conditioned_density") {
    const auto mu = GridDensity::uniform(1024);
    const auto dbl = single_map_schedule(make_affine(2));
    const auto halves = cylinder_partition(dbl, 1, 1);
    const auto cd = conditioned_density(mu, halves[0]);
    CHECK(cd.function().integral() == Approx(1.0).epsilon(1e-12));
    CHECK(cd.function()[100] == Approx(2.0).epsilon(1e-2));
    CHECK(cd.function()[900] == 0.0);

    CylinderSet full;
    const auto same = conditioned_density(mu, full);
    CHECK(same.function()[17] == Approx(1.0));
}

TEST_CASE("correlation2 and correlation3") {
    const std::size_t G = 4096;
    const TransferChain dbl(single_map_schedule(make_affine(2)), G);
    const auto mu = GridDensity::uniform(G);
    auto cos1 = [](double x) { return std::cos(2 * kPi * x); };
    const auto r1 = correlation2(dbl, cos1, cos1, 0, 1, mu);
    CHECK(std::abs(r1.transfer) < 1e-8);
    const auto r0 = correlation2(dbl, cos1, cos1, 0, 0, mu);
    CHECK(r0.transfer == Approx(0.5).epsilon(1e-8));
    REQUIRE(r0.orbit_available);
    CHECK(r0.orbit == Approx(0.5).epsilon(1e-8));
    const auto rc = correlation2(dbl, [](double) { return 2.0; }, cos1, 1, 2, mu);
    CHECK(std::abs(rc.transfer) < 1e-14);

    const TransferChain chain(perturbed_cycle(), G);
    for (std::size_t m = 0; m <= 4; ++m) {
        const auto r = correlation2(chain, cos1, cos1, 2, m, mu);
        REQUIRE(r.orbit_available);
        CHECK(std::abs(r.difference()) < 1e-5);
    }
    const auto c3 = correlation3(chain, cos1, cos1, cos1, 1, 1, 1, mu);
    REQUIRE(c3.orbit_available);
    CHECK(std::abs(c3.difference()) < 1e-5);

    CHECK_THROWS_AS(chain_expectation_orbit(chain.schedule(), mu, {{30, cos1}}, 16), ResourceError);
}
