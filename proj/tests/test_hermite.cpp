#include <doctest.h>

#include <cmath>

#include "lrdseq/errors.hpp"
#include "lrdseq/hermite.hpp"
#include "lrdseq/normal.hpp"
#include "lrdseq/rng.hpp"

using namespace lrdseq;

TEST_CASE("hermite basics") {
    CHECK(hermite(0, 3.7) == 1.0);
    CHECK(hermite(1, -2.5) == -2.5);
    CHECK(hermite(3, 2.0) == doctest::Approx(2.0));  // y^3 - 3y at 2
    CHECK(hermite(4, 0.0) == doctest::Approx(3.0));  // (-1)^2 3!!
    // explicit H_5 against the recurrence
    for (double y : {-1.7, 0.3, 2.9}) {
        const double h5 = y * y * y * y * y - 10.0 * y * y * y + 15.0 * y;
        CHECK(hermite(5, y) == doctest::Approx(h5).epsilon(1e-12));
    }
    CHECK_THROWS_AS(hermite(65, 0.0), OrderTooLarge);
    CHECK_THROWS_AS(hermite(-1, 0.0), OrderTooLarge);
}

TEST_CASE("parity values at zero are exact integers") {
    long long dfact = 1; // (m-1)!! for even m
    for (int m = 0; m <= 15; ++m) {
        if (m % 2 == 1) {
            CHECK(hermite(m, 0.0) == 0.0);
        } else {
            if (m >= 2) dfact *= (m - 1);
            const double expected = ((m / 2) % 2 == 0 ? 1.0 : -1.0) *
                                    static_cast<double>(m == 0 ? 1 : dfact);
            CHECK(hermite(m, 0.0) == expected);
        }
    }
}

TEST_CASE("hermite_multi is the product of univariate values") {
    {
        const int l[] = {0, 0};
        const double x[] = {1.3, -0.4};
        CHECK(hermite_multi(l, x) == 1.0);
    }
    {
        const int l[] = {1, 2};
        const double x[] = {1.0, 2.0};
        CHECK(hermite_multi(l, x) == doctest::Approx(3.0)); // 1 * (4 - 1)
    }
    {
        const int l[] = {3, 0, 1};
        const double x[] = {2.0, 9.0, -1.0};
        CHECK(hermite_multi(l, x) == doctest::Approx(-2.0)); // 2 * 1 * (-1)
    }
    {
        const int l[] = {1, 2};
        const double x[] = {1.0};
        CHECK_THROWS_AS(hermite_multi(l, x), DimensionMismatch);
    }
}

TEST_CASE("multi index enumeration") {
    CHECK(multi_indices_of_order(1, 4) == std::vector<std::vector<int>>{{4}});
    const auto idx = multi_indices_of_order(2, 2);
    CHECK(idx.size() == 3);
    // p = 3, order 2: C(4,2) = 6 compositions
    CHECK(multi_indices_of_order(3, 2).size() == 6);
}

TEST_CASE("expand_hermite_linear basis cases") {
    {
        const double a[] = {1.0, 0.0};
        const auto exp = expand_hermite_linear(1, a);
        REQUIRE(exp.size() == 2);
        for (const auto& [idx, coeff] : exp) {
            if (idx == std::vector<int>{1, 0}) CHECK(coeff == doctest::Approx(1.0));
            if (idx == std::vector<int>{0, 1}) CHECK(coeff == doctest::Approx(0.0));
        }
    }
    {
        const double s = 1.0 / std::sqrt(2.0);
        const double a[] = {s, s};
        const auto exp = expand_hermite_linear(2, a);
        for (const auto& [idx, coeff] : exp) {
            if (idx == std::vector<int>{2, 0}) CHECK(coeff == doctest::Approx(0.5));
            if (idx == std::vector<int>{1, 1}) CHECK(coeff == doctest::Approx(1.0));
            if (idx == std::vector<int>{0, 2}) CHECK(coeff == doctest::Approx(0.5));
        }
    }
    {
        const double a[] = {0.9, 0.9};
        CHECK_THROWS_AS(expand_hermite_linear(2, a), NotUnitNorm);
    }
}

TEST_CASE("expansion equals the direct evaluation") {
    SplitMix64 gen(31337);
    for (int m = 1; m <= 6; ++m) {
        for (int p = 1; p <= 4; ++p) {
            for (int rep = 0; rep < 10; ++rep) {
                std::vector<double> a(static_cast<std::size_t>(p));
                double norm2 = 0.0;
                for (auto& v : a) {
                    v = 2.0 * gen.next_unit() - 1.0;
                    norm2 += v * v;
                }
                for (auto& v : a) v /= std::sqrt(norm2);
                const auto expansion = expand_hermite_linear(m, a);
                for (int xrep = 0; xrep < 5; ++xrep) {
                    std::vector<double> x(static_cast<std::size_t>(p));
                    double dot = 0.0;
                    for (int d = 0; d < p; ++d) {
                        x[static_cast<std::size_t>(d)] = 6.0 * gen.next_unit() - 3.0;
                        dot += a[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
                    }
                    double acc = 0.0;
                    for (const auto& [idx, coeff] : expansion)
                        acc += coeff * hermite_multi(idx, x);
                    CHECK(std::abs(acc - hermite(m, dot)) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("hermite roots interlace and evaluate to zero") {
    const auto r2 = hermite_roots(2);
    CHECK(r2[0] == doctest::Approx(-1.0));
    CHECK(r2[1] == doctest::Approx(1.0));
    const auto r3 = hermite_roots(3);
    CHECK(r3[0] == doctest::Approx(-std::sqrt(3.0)));
    CHECK(r3[1] == doctest::Approx(0.0));
    CHECK(r3[2] == doctest::Approx(std::sqrt(3.0)));
    for (int m : {4, 7, 10}) {
        const auto roots = hermite_roots(m);
        REQUIRE(static_cast<int>(roots.size()) == m);
        for (double r : roots) CHECK(std::abs(hermite(m, r)) < 1e-8);
        for (std::size_t i = 1; i < roots.size(); ++i) CHECK(roots[i] > roots[i - 1]);
    }
}

TEST_CASE("normal helpers") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    for (double x : {-3.0, -0.7, 0.0, 1.1, 4.2})
        CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-10));
    CHECK(std::isinf(normal_quantile(0.0)));
    CHECK(std::isinf(normal_quantile(1.0)));
}
