#include <doctest.h>

#include <cmath>

#include "lrdseq/chaining.hpp"
#include "lrdseq/errors.hpp"
#include "lrdseq/hermite.hpp"
#include "lrdseq/normal.hpp"
#include "lrdseq/rng.hpp"

#include "oracles.hpp"

using namespace lrdseq;

namespace {

const double kC = std::sqrt(2.0 * std::log(2.0));

Subordinator identity1() { return Subordinator{1, {Component(IdentityComp{0})}}; }

Subordinator square1() { return Subordinator{1, {Component(SquareComp{0})}}; }

Subordinator joint_example2() {
    Subordinator G;
    G.p = 1;
    G.components = {Component(SquareComp{0}),
                    Component(IndicatorComp{
                        0, IntervalSet::of(-kInf, -kC).unite(IntervalSet::of(0.0, kC))})};
    return G;
}

} // namespace

TEST_CASE("abs hermite mass closed forms") {
    // E|H_1| = E|X| = sqrt(2/pi)
    CHECK(abs_hermite_mass(1, IntervalSet::all()) ==
          doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    // E|H_2| = E|X^2 - 1| = 4 phi(1)
    CHECK(abs_hermite_mass(2, IntervalSet::all()) ==
          doctest::Approx(4.0 * normal_pdf(1.0)).epsilon(1e-12));
    // against the numeric quadrature oracle on random regions and orders
    SplitMix64 gen(31);
    for (int trial = 0; trial < 25; ++trial) {
        const double a = 5.0 * gen.next_unit() - 2.5;
        const double b = a + 4.0 * gen.next_unit();
        const int m = 1 + static_cast<int>(gen.next() % 5);
        const double mine = abs_hermite_mass(m, IntervalSet::of(a, b));
        const double truth = oracle::simpson(
            [m](double s) { return std::abs(hermite(m, s)) * normal_pdf(s); }, a, b,
            1e-11);
        CHECK(mine == doctest::Approx(truth).epsilon(1e-8));
    }
}

TEST_CASE("build_lambda totals match the analytic values") {
    const auto lam1 = build_lambda(identity1(), 1, SubordinationMode::univariate, 512);
    CHECK(lam1.total == doctest::Approx(1.0 + std::sqrt(2.0 / M_PI)).epsilon(1e-9));

    const auto lam2 = build_lambda(square1(), 2, SubordinationMode::univariate, 512);
    CHECK(lam2.total == doctest::Approx(1.0 + 2.0 * normal_pdf(1.0)).epsilon(1e-9));

    // Lambda(-inf) = 0 and monotone nondecreasing along the table
    for (const auto& table : lam1.dims) {
        CHECK(table.value(-kInf) == 0.0);
        double prev = -1.0;
        for (std::size_t i = 0; i < table.x.size(); ++i) {
            CHECK(table.left[i] <= table.right[i] + 1e-12);
            CHECK(table.right[i] >= prev - 1e-12);
            prev = table.right[i];
        }
    }
}

TEST_CASE("lambda table values match the quadrature oracle") {
    const auto lam = build_lambda(square1(), 2, SubordinationMode::univariate, 2048);
    const auto& table = lam.dims[0];
    SplitMix64 gen(77);
    for (int trial = 0; trial < 20; ++trial) {
        const double x = 4.0 * gen.next_unit();
        const auto region = component_sublevel(SquareComp{0}, x);
        const double truth =
            region.normal_mass() +
            oracle::simpson_over(
                [](double s) { return std::abs(hermite(2, s)) * normal_pdf(s); }, region,
                1e-11) /
                2.0;
        CHECK(table.value(x) == doctest::Approx(truth).epsilon(2e-6));
    }
}

TEST_CASE("multivariate lambda uses the order-m multi-index sum") {
    Subordinator G;
    G.p = 2;
    G.components = {Component(IdentityComp{0}), Component(IdentityComp{1})};
    const auto lam = build_lambda(G, 2, SubordinationMode::multivariate, 256);
    // Lambda_j(inf) = 1 + sum_{|l|=2} E|H_l| / prod l_i!
    // indices (2,0),(1,1),(0,2): E|H_2|/2 twice and E|H_1|^2 once
    const double e1 = std::sqrt(2.0 / M_PI);
    const double e2 = 4.0 * normal_pdf(1.0);
    const double expected = 1.0 + e2 / 2.0 + e1 * e1 + e2 / 2.0;
    CHECK(lam.total == doctest::Approx(expected).epsilon(1e-9));
    CHECK(lam.dims.size() == 2);
    CHECK(lam.dims[0].total == doctest::Approx(lam.dims[1].total).epsilon(1e-12));
}

TEST_CASE("chaining points: level 0 and the identity midpoint") {
    const auto lam = build_lambda(identity1(), 1, SubordinationMode::univariate, 2048);
    const auto lvl0 = chaining_points(lam, 0, 0);
    REQUIRE(lvl0.size() == 2);
    CHECK(lvl0[0] == -kInf);
    CHECK(lvl0[1] == kInf);

    // Lambda is symmetric for the identity map: the k=1 midpoint is 0
    const auto lvl1 = chaining_points(lam, 0, 1);
    REQUIRE(lvl1.size() == 3);
    CHECK(std::abs(lvl1[1]) < 1e-3);

    CHECK_THROWS_AS(chaining_points(lam, 0, 21), CapExceeded);
    CHECK_THROWS_AS(chaining_points(lam, 2, 1), IndexOutOfRange);
}

TEST_CASE("increment bound holds at every chaining point") {
    for (const auto& lam :
         {build_lambda(identity1(), 1, SubordinationMode::univariate, 1024),
          build_lambda(joint_example2(), 1, SubordinationMode::univariate, 1024)}) {
        for (int d = 0; d < static_cast<int>(lam.dims.size()); ++d) {
            const auto& table = lam.dims[static_cast<std::size_t>(d)];
            for (int k = 1; k <= 8; ++k) {
                const auto pts = chaining_points(lam, d, k);
                const double bound =
                    lam.total * std::pow(2.0, -k) + 1e-9 * (1.0 + lam.total);
                for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                    const double inc = table.left_value(pts[i + 1]) - table.value(pts[i]);
                    CHECK(inc <= bound);
                }
            }
        }
    }
}

TEST_CASE("dyadic nesting: level-k points reappear at level k+1") {
    const auto lam = build_lambda(joint_example2(), 1, SubordinationMode::univariate, 1024);
    for (int d = 0; d < 2; ++d) {
        for (int k = 1; k <= 7; ++k) {
            const auto coarse = chaining_points(lam, d, k);
            const auto fine = chaining_points(lam, d, k + 1);
            for (std::size_t i = 0; i < coarse.size(); ++i)
                CHECK(coarse[i] == fine[2 * i]);
        }
    }
}

TEST_CASE("partition counts match the combinatorial formula") {
    for (int p = 1; p <= 4; ++p) {
        long long total = 0;
        const auto grouped = enumerate_partitions(p, 12);
        for (int k = 1; k <= 12; ++k) {
            long long expected = partitions_of_quality(p, k);
            CHECK(static_cast<long long>(grouped[static_cast<std::size_t>(k - 1)].size()) ==
                  expected);
            total += expected;
        }
        long long fullp = 1;
        for (int i = 0; i < p; ++i) fullp *= 13;
        CHECK(total == fullp - 1);
    }
    // spec arithmetic: p=2 K=3 -> 3,5,7 total 15; p=3 K=2 -> 7,19 total 26
    CHECK(partitions_of_quality(2, 1) == 3);
    CHECK(partitions_of_quality(2, 2) == 5);
    CHECK(partitions_of_quality(2, 3) == 7);
    CHECK(partitions_of_quality(3, 1) == 7);
    CHECK(partitions_of_quality(3, 2) == 19);
    CHECK_THROWS_AS(enumerate_partitions(5, 3), CapExceeded);
    CHECK_THROWS_AS(enumerate_partitions(2, 13), CapExceeded);
}

TEST_CASE("decompose covers the lower quadrant disjointly") {
    const auto lam = build_lambda(joint_example2(), 1, SubordinationMode::univariate, 1024);
    const int K = 4;
    const auto scheme = build_scheme(lam, K);

    SUBCASE("p=1 hand case") {
        const auto lam1 = build_lambda(identity1(), 1, SubordinationMode::univariate, 1024);
        const auto s1 = build_scheme(lam1, 1);
        const auto mid = s1.points[0][1][1];
        const std::vector<double> x{mid + 0.5};
        const auto dec = decompose(x, 1, s1);
        REQUIRE(dec.boxes.size() == 1);
        CHECK(dec.boxes[0].lo[0] == -kInf);
        CHECK(dec.boxes[0].hi[0] == mid);
        CHECK(dec.a_corner[0] == mid);
    }

    SUBCASE("sentinel point decomposes to nothing") {
        const std::vector<double> x{-kInf, -kInf};
        const auto dec = decompose(x, K, scheme);
        CHECK(dec.a_corner[0] == -kInf);
        for (const auto& box : dec.boxes) {
            // every box is empty: (lo, hi] with lo == hi == -inf
            CHECK(box.lo[0] == box.hi[0]);
        }
    }

    SUBCASE("random probes") {
        SplitMix64 gen(123);
        int bad = 0;
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(2);
            x[0] = 5.0 * gen.next_unit();          // square outputs live in [0, inf)
            x[1] = 2.0 * gen.next_unit() - 0.5;    // indicator outputs in {0, 1}
            const auto dec = decompose(x, K, scheme);
            for (int probe = 0; probe < 400; ++probe) {
                std::vector<double> y(2);
                y[0] = 6.0 * gen.next_unit() - 0.5;
                y[1] = 2.5 * gen.next_unit() - 0.75;
                int hits = 0;
                for (const auto& box : dec.boxes) {
                    bool inside = true;
                    for (int d = 0; d < 2 && inside; ++d)
                        inside = y[static_cast<std::size_t>(d)] > box.lo[static_cast<std::size_t>(d)] &&
                                 y[static_cast<std::size_t>(d)] <= box.hi[static_cast<std::size_t>(d)];
                    if (inside) ++hits;
                }
                const bool in_quadrant = y[0] <= dec.a_corner[0] && y[1] <= dec.a_corner[1];
                if (hits != (in_quadrant ? 1 : 0)) ++bad;
            }
        }
        CHECK(bad == 0);
    }

    SUBCASE("partition tuples stay within quality bounds") {
        const std::vector<double> x{1.3, 0.5};
        const auto dec = decompose(x, K, scheme);
        CHECK(dec.boxes.size() == static_cast<std::size_t>(K * K));
        for (const auto& box : dec.boxes)
            for (int v : box.partition_tuple) {
                CHECK(v >= 1);
                CHECK(v <= K);
            }
        // corners sandwich x
        CHECK(dec.a_corner[0] <= 1.3);
        CHECK(dec.b_corner[0] >= 1.3);
    }
}

TEST_CASE("lambda domination") {
    SUBCASE("identity, full-line pair") {
        const auto lam = build_lambda(identity1(), 1, SubordinationMode::univariate, 1024);
        std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
        pairs.push_back({{-kInf}, {kInf}});
        const auto rep = lambda_domination_report(identity1(), 1, lam, pairs);
        CHECK(rep.violations == 0);
        // F increment 1 <= Lambda(inf) = 1.79788
        CHECK(rep.worst_margin == doctest::Approx(lam.total - 1.0).epsilon(1e-6));
    }
    SUBCASE("degenerate pair x == y") {
        const auto lam = build_lambda(identity1(), 1, SubordinationMode::univariate, 256);
        std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
        pairs.push_back({{0.3}, {0.3}});
        const auto rep = lambda_domination_report(identity1(), 1, lam, pairs);
        CHECK(rep.violations == 0);
        CHECK(rep.worst_margin >= -1e-12);
    }
    SUBCASE("random pairs on example 2") {
        const auto G = joint_example2();
        const auto lam = build_lambda(G, 1, SubordinationMode::univariate, 2048);
        SplitMix64 gen(9);
        std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
        for (int i = 0; i < 40; ++i) {
            std::vector<double> a(2), b(2);
            for (int d = 0; d < 2; ++d) {
                const double u = 4.0 * gen.next_unit() - 1.0;
                const double v = 4.0 * gen.next_unit() - 1.0;
                a[static_cast<std::size_t>(d)] = std::min(u, v);
                b[static_cast<std::size_t>(d)] = std::max(u, v);
            }
            pairs.emplace_back(a, b);
        }
        const auto rep = lambda_domination_check(G, 1, SubordinationMode::univariate,
                                                 lam, pairs, 1e-6);
        CHECK(rep.violations == 0);
        CHECK(rep.pairs == 40);
    }
}

TEST_CASE("build_lambda rejects non-separable subordinators") {
    Subordinator mixed;
    mixed.p = 2;
    mixed.components = {Component(LinearComp{{0.6, 0.8}})};
    CHECK_THROWS_AS(build_lambda(mixed, 1, SubordinationMode::multivariate),
                    DimensionMismatch);
}
