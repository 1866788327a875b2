#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "seqclt/cylinders.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/maps.hpp"
#include "seqclt/schedule.hpp"

using namespace seqclt;
using doctest::Approx;

namespace {

Atlas atlas() {
    return {{"doubling", make_affine(2)},
            {"tripling", make_affine(3)},
            {"c0", make_perturbed(0.0)},
            {"c05", make_perturbed(0.05)},
            {"c1", make_perturbed(0.1)},
            {"contract", make_circle_diffeo(0.5)}};
}

SequentialSchedule explicit_schedule(std::vector<std::string> labels, double Lambda = 2.0) {
    return SequentialSchedule(ExplicitRule{std::move(labels)}, atlas(), 1, Lambda);
}

}  // namespace

TEST_CASE("eval_map on doubling and perturbed maps") {
    CHECK(eval_map(*make_affine(2), 0.3) == Approx(0.6).epsilon(1e-15));
    CHECK(eval_map(*make_perturbed(0.05), 0.25) == Approx(0.55).epsilon(1e-14));
    CHECK(eval_map(*make_affine(2), 0.0) == 0.0);
    CHECK(eval_map(*make_perturbed(0.1), 0.0) == 0.0);
    CHECK(eval_map(*make_affine(3), 0.5) == Approx(0.5));
}

TEST_CASE("eval_map reads points on the circle") {
    CHECK(eval_map(*make_affine(2), 1.3) == Approx(eval_map(*make_affine(2), 0.3)));
    CHECK(eval_map(*make_affine(2), 1.0) == 0.0);
}

TEST_CASE("perturbed map needs |c| < 1/pi") {
    CHECK_THROWS_AS(make_perturbed(0.5), DomainError);
}

TEST_CASE("inverse_branches of linear maps") {
    const auto d = inverse_branches(*make_affine(2), 0.5);
    REQUIRE(d.size() == 2);
    CHECK(d[0].branch == 0);
    CHECK(d[0].x == Approx(0.25));
    CHECK(d[0].abs_derivative == Approx(2.0));
    CHECK(d[1].x == Approx(0.75));

    const auto t = inverse_branches(*make_affine(3), 0.3);
    REQUIRE(t.size() == 3);
    CHECK(t[0].x == Approx(0.1));
    CHECK(t[1].x == Approx(1.3 / 3.0));
    CHECK(t[2].x == Approx(2.3 / 3.0));
    for (const auto& p : t) {
        CHECK(p.abs_derivative == Approx(3.0));
    }
}

TEST_CASE("inverse_branches of the perturbed map solves the branch equation") {
    const auto map = make_perturbed(0.05);
    const auto pre = inverse_branches(*map, 0.55);
    REQUIRE(pre.size() == 2);
    CHECK(pre[0].x == Approx(0.25).epsilon(1e-12));
    for (const auto& p : pre) {
        CHECK(std::fmod(2.0 * p.x + 0.05 * std::sin(2.0 * std::numbers::pi * p.x), 1.0) == Approx(0.55).epsilon(1e-12));
        CHECK(p.abs_derivative == Approx(2.0 + 0.1 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * p.x)));
    }
}

TEST_CASE("compose_eval") {
    const auto s = explicit_schedule({"doubling", "tripling"});
    CHECK(compose_eval(s, 1, 0, 0.42) == 0.42);
    CHECK(compose_eval(s, 3, 2, 0.42) == 0.42);
    CHECK(compose_eval(s, 1, 2, 0.1) == Approx(0.6).epsilon(1e-14));
    CHECK(compose_derivative(s, 1, 2, 0.1) == Approx(6.0));

    const auto dbl = single_map_schedule(make_affine(2));
    CHECK(compose_eval(dbl, 1, 10, 1.0 / 3.0) == Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("schedule rules") {
    const SequentialSchedule cyc(CyclicRule{{"c05", "c1", "c0"}}, atlas(), 1, 2.0 - 0.2 * std::numbers::pi);
    CHECK(cyc.map_ptr_at(1) == cyc.atlas().at("c05"));
    CHECK(cyc.map_ptr_at(2) == cyc.atlas().at("c1"));
    CHECK(cyc.map_ptr_at(3) == cyc.atlas().at("c0"));
    CHECK(cyc.map_ptr_at(4) == cyc.atlas().at("c05"));
    CHECK(cyc.horizon() == 0);
    CHECK(cyc.rule_maps().size() == 3);

    const auto ex = explicit_schedule({"doubling", "tripling"});
    CHECK(ex.horizon() == 2);
    CHECK_THROWS_AS(ex.map_at(3), DomainError);
    CHECK_THROWS_AS(ex.map_at(0), DomainError);

    CHECK_THROWS_AS(SequentialSchedule(ExplicitRule{{"nope"}}, atlas()), ConfigError);
    CHECK_THROWS_AS(SequentialSchedule(ExplicitRule{{"doubling"}}, atlas(), 1, 1.0), ConfigError);
}

TEST_CASE("cylinder partitions") {
    const auto dbl = single_map_schedule(make_affine(2));
    const auto one = cylinder_partition(dbl, 1, 1);
    REQUIRE(one.size() == 2);
    CHECK(one[0].left == Approx(0.0));
    CHECK(one[0].right == Approx(0.5));
    CHECK(one[1].right == Approx(1.0));

    const auto two = cylinder_partition(dbl, 1, 2);
    REQUIRE(two.size() == 4);
    for (const auto& c : two) {
        CHECK(c.width() == Approx(0.25));
        CHECK(c.depth == 2);
    }

    const auto s = explicit_schedule({"doubling", "tripling"});
    const auto six = cylinder_partition(s, 1, 2);
    REQUIRE(six.size() == 6);
    double total = 0.0;
    for (const auto& c : six) {
        total += c.width();
        CHECK(c.width() == Approx(1.0 / 6.0));
    }
    CHECK(total == Approx(1.0).epsilon(1e-14));

    const auto pert = SequentialSchedule(CyclicRule{{"c05", "c1"}}, atlas(), 1, 1.5);
    const auto cyl = cylinder_partition(pert, 1, 4);
    REQUIRE(cyl.size() == 16);
    double sum = 0.0;
    for (std::size_t i = 0; i < cyl.size(); ++i) {
        sum += cyl[i].width();
        if (i > 0) {
            CHECK(cyl[i].left == Approx(cyl[i - 1].right).epsilon(1e-13));
        }
        CHECK(forward_word(pert, 1, cyl[i].word, 0.5 * (cyl[i].left + cyl[i].right)) ==
              Approx(compose_eval(pert, 1, 4, 0.5 * (cyl[i].left + cyl[i].right))).epsilon(1e-9));
    }
    CHECK(sum == Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(cylinder_partition(dbl, 1, 30, 1024), ResourceError);
}

TEST_CASE("cylinder CSV export") {
    std::ostringstream os;
    write_cylinders_csv(os, cylinder_partition(single_map_schedule(make_affine(2)), 1, 1));
    const std::string text = os.str();
    CHECK(text.rfind("left,right,depth,word", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("expansion_factor") {
    CHECK(expansion_factor(single_map_schedule(make_affine(2)), 1, 1).value == Approx(2.0));
    CHECK(expansion_factor(explicit_schedule({"doubling", "tripling"}), 1, 2).value == Approx(6.0));
    CHECK(expansion_factor(single_map_schedule(make_perturbed(0.05)), 1, 1).value ==
          Approx(2.0 - 0.1 * std::numbers::pi).epsilon(1e-6));
    CHECK(make_perturbed(0.05)->min_slope() == Approx(2.0 - 0.1 * std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("verify_ue") {
    const auto dbl = verify_ue(single_map_schedule(make_affine(2)), 6);
    CHECK(dbl.ok());
    CHECK(dbl.B == 0.0);
    CHECK(dbl.K() == 0.0);

    const double pi = std::numbers::pi;
    const double Lambda = 2.0 - 0.2 * pi;
    const SequentialSchedule pert(CyclicRule{{"c0", "c05", "c1"}}, atlas(), 1, Lambda);
    const auto rep = verify_ue(pert, 6);
    CHECK(rep.ok());
    const double B = 4.0 * pi * pi * 0.1 / ((2.0 - 0.2 * pi) * (2.0 - 0.2 * pi));
    CHECK(rep.B <= B * (1.0 + 1e-9));
    // sup |T''|/T'^2 of the c = 0.1 map, located by a dense scan.
    double sup = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double x = i / 200000.0;
        const double d1 = 2.0 + 0.2 * pi * std::cos(2 * pi * x);
        sup = std::max(sup, 0.4 * pi * pi * std::abs(std::sin(2 * pi * x)) / (d1 * d1));
    }
    CHECK(rep.B == Approx(sup).epsilon(1e-4));
    CHECK(rep.C_star <= B * Lambda / (1.0 - 1.0 / Lambda) * (1.0 + 1e-9));
    CHECK(distortion_constant(rep.a, B, 1, Lambda) == Approx(B * Lambda / (1.0 - 1.0 / Lambda)));

    const auto bad = verify_ue(explicit_schedule({"doubling", "contract", "doubling"}, 1.5), 3);
    CHECK_FALSE(bad.ok());
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations.front().j == 2);
}
