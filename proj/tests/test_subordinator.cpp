#include <doctest.h>

#include <cmath>

#include "lrdseq/errors.hpp"
#include "lrdseq/intervals.hpp"
#include "lrdseq/normal.hpp"
#include "lrdseq/rng.hpp"
#include "lrdseq/subordinator.hpp"

using namespace lrdseq;

TEST_CASE("interval set algebra") {
    const auto a = IntervalSet::of(-1.0, 2.0);
    const auto b = IntervalSet::of(0.0, 5.0);
    CHECK(a.intersect(b).parts().size() == 1);
    CHECK(a.intersect(b).parts()[0].lo == 0.0);
    CHECK(a.intersect(b).parts()[0].hi == 2.0);
    CHECK(a.unite(b).parts().size() == 1);

    const auto comp = a.complement();
    REQUIRE(comp.parts().size() == 2);
    CHECK(comp.parts()[0].hi == -1.0);
    CHECK(comp.parts()[1].lo == 2.0);
    CHECK(comp.complement().parts().size() == 1);

    CHECK(IntervalSet::all().normal_mass() == doctest::Approx(1.0));
    CHECK(IntervalSet::of(0.0, kInf).normal_mass() == doctest::Approx(0.5));
    CHECK(IntervalSet::empty().is_empty());
    CHECK(IntervalSet::of(3.0, 1.0).is_empty()); // inverted bounds
}

TEST_CASE("component sublevel sets") {
    const double c = std::sqrt(2.0 * std::log(2.0));

    SUBCASE("identity") {
        const auto s = component_sublevel(IdentityComp{0}, 1.5);
        REQUIRE(s.parts().size() == 1);
        CHECK(s.parts()[0].hi == 1.5);
        CHECK(s.parts()[0].lo == -kInf);
    }
    SUBCASE("square") {
        const auto s = component_sublevel(SquareComp{0}, 4.0);
        REQUIRE(s.parts().size() == 1);
        CHECK(s.parts()[0].lo == doctest::Approx(-2.0));
        CHECK(s.parts()[0].hi == doctest::Approx(2.0));
        CHECK(component_sublevel(SquareComp{0}, -1.0).is_empty());
    }
    SUBCASE("abs") {
        const auto s = component_sublevel(AbsComp{0}, 1.0);
        CHECK(s.parts()[0].lo == -1.0);
        CHECK(s.parts()[0].hi == 1.0);
    }
    SUBCASE("poly ge quadratic") {
        // s^2 <= 1 via the generic poly path
        PolyComp poly{0, {0.0, 0.0, 1.0}};
        const auto s = component_sublevel(poly, 1.0);
        REQUIRE(s.parts().size() == 1);
        CHECK(s.parts()[0].lo == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(s.parts()[0].hi == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("poly cubic has split sublevels") {
        // s^3 - 3s <= 0 on (-inf, -sqrt(3)] u [0... sign pattern check by membership
        PolyComp poly{0, {0.0, -3.0, 0.0, 1.0}};
        const auto s = component_sublevel(poly, 0.0);
        CHECK(s.contains(-10.0));
        CHECK(s.contains(-1.9));
        CHECK(!s.contains(-1.0));
        CHECK(s.contains(0.5));
        CHECK(s.contains(1.6));
        CHECK(!s.contains(2.0));
    }
    SUBCASE("indicator thresholds") {
        IndicatorComp ind{0, IntervalSet::of(-kInf, -c).unite(IntervalSet::of(0.0, c))};
        CHECK(component_sublevel(ind, -0.5).is_empty());
        const auto mid = component_sublevel(ind, 0.5); // complement of A
        CHECK(mid.contains(-0.5));
        CHECK(!mid.contains(0.5));
        CHECK(mid.contains(c + 1.0));
        CHECK(component_sublevel(ind, 1.0).is_all());
        // strict variants move the jump
        CHECK(component_sublevel(ind, 0.0, true).is_empty());
        CHECK(!component_sublevel(ind, 1.0, true).is_all());
    }
    SUBCASE("linear single coordinate") {
        LinearComp lin{{-2.0}};
        const auto s = component_sublevel(lin, 1.0); // -2s <= 1 -> s >= -0.5
        REQUIRE(s.parts().size() == 1);
        CHECK(s.parts()[0].lo == doctest::Approx(-0.5));
        CHECK(s.parts()[0].hi == kInf);
    }
}

TEST_CASE("membership property: region matches direct evaluation") {
    // For random separable subordinators, sublevel membership must agree
    // with evaluating the component.
    SplitMix64 gen(555);
    for (int trial = 0; trial < 200; ++trial) {
        Component comp;
        switch (gen.next() % 5) {
            case 0: comp = IdentityComp{0}; break;
            case 1: comp = SquareComp{0}; break;
            case 2: comp = AbsComp{0}; break;
            case 3: {
                PolyComp poly{0, {}};
                const int deg = 1 + static_cast<int>(gen.next() % 3);
                for (int i = 0; i <= deg; ++i)
                    poly.coeffs.push_back(2.0 * gen.next_unit() - 1.0);
                if (poly.coeffs.back() == 0.0) poly.coeffs.back() = 0.5;
                comp = poly;
                break;
            }
            default: {
                const double a = 2.0 * gen.next_unit() - 1.0;
                const double b = a + 2.0 * gen.next_unit();
                comp = IndicatorComp{0, IntervalSet::of(a, b)};
                break;
            }
        }
        Subordinator G{1, {comp}};
        const double thr = 4.0 * gen.next_unit() - 2.0;
        const auto region = component_sublevel(comp, thr);
        for (int probe = 0; probe < 50; ++probe) {
            const double s = 8.0 * gen.next_unit() - 4.0;
            const double val = G.evaluate(std::vector<double>{s})[0];
            // skip knife-edge probes: interval endpoints are null sets
            if (std::abs(val - thr) < 1e-9) continue;
            CHECK(region.contains(s) == (val <= thr));
        }
    }
}

TEST_CASE("coordinate regions and separability") {
    Subordinator G;
    G.p = 2;
    G.components = {Component(SquareComp{0}), Component(IdentityComp{1})};
    CHECK(G.separable());
    const std::vector<double> x{1.0, 0.5};
    const auto regions = coordinate_regions(G, x);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].contains(0.5));
    CHECK(!regions[0].contains(1.5));
    CHECK(regions[1].contains(-3.0));
    CHECK(!regions[1].contains(1.0));

    // +inf drops constraints, -inf empties
    const std::vector<double> xs{kInf, -kInf};
    const auto r2 = coordinate_regions(G, xs);
    CHECK(r2[0].is_all());
    CHECK(r2[1].is_empty());

    Subordinator mixed;
    mixed.p = 2;
    mixed.components = {Component(LinearComp{{0.6, 0.8}})};
    CHECK(!mixed.separable());
    const std::vector<double> xm{0.0};
    CHECK_THROWS_AS(coordinate_regions(mixed, xm), DimensionMismatch);
}

TEST_CASE("box regions") {
    Subordinator G{1, {Component(IdentityComp{0})}};
    const std::vector<double> a{0.0}, b{1.0};
    const auto regions = coordinate_regions_box(G, a, b);
    CHECK(regions[0].normal_mass() ==
          doctest::Approx(normal_cdf(1.0) - normal_cdf(0.0)).epsilon(1e-12));
}

TEST_CASE("validation diagnostics") {
    Subordinator bad{1, {Component(IdentityComp{3})}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    Subordinator empty{1, {}};
    CHECK_THROWS_AS(empty.validate(), ConfigError);
}
