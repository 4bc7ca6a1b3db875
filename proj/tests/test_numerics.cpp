#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "efwe/distributions.hpp"
#include "efwe/errors.hpp"
#include "efwe/numerics.hpp"
#include "support.hpp"

using namespace efwe;
using namespace efwe::numerics;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("find_root on simple brackets", "[numerics][root]") {
    CHECK_THAT(find_root([](double x) { return x * x - 4.0; }, {0.0, 5.0}, 1e-12),
               WithinAbs(2.0, 1e-12));
    CHECK_THAT(find_root([](double x) { return x; }, {-1.0, 1.0}), WithinAbs(0.0, 1e-12));
}

TEST_CASE("find_root agrees with plain bisection", "[numerics][root]") {
    auto f = [](double x) { return std::cos(x) - x; };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    const double root = find_root(f, {0.0, 1.0});
    CHECK_THAT(root, WithinAbs(0.5 * (lo + hi), 1e-10));
    CHECK_THAT(root, WithinAbs(0.739085133215161, 1e-12));

    // Re-solving on a bracket around the answer returns the same point.
    CHECK_THAT(find_root(f, {root - 1e-3, root + 1e-3}), WithinAbs(root, 1e-12));
}

TEST_CASE("find_root reports bad input", "[numerics][root]") {
    CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, {-1.0, 1.0}), BracketError);
    CHECK_THROWS_AS(find_root([](double x) { return x; }, {1.0, -1.0}), BracketError);
    CHECK_THROWS_AS(find_root([](double) { return std::nan(""); }, {0.0, 1.0}), EvaluationError);
}

TEST_CASE("integrate_semi_infinite closed forms", "[numerics][quad]") {
    CHECK_THAT(integrate_semi_infinite([](double x) { return std::exp(-x); }), WithinAbs(1.0, 1e-9));
    CHECK_THAT(integrate_semi_infinite([](double x) { return x * std::exp(-0.5 * x * x); }),
               WithinAbs(1.0, 1e-9));
    const EfweParams p(1.0, 1.0, 1.0);
    CHECK_THAT(integrate_semi_infinite([&](double x) { return pdf(p, x); }),
               WithinAbs(std::exp(-1.0), 1e-8));
}

TEST_CASE("integrate on a finite interval", "[numerics][quad]") {
    CHECK_THAT(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi),
               WithinAbs(2.0, 1e-10));
    CHECK_THAT(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0),
               WithinAbs(2.0, 1e-7));
    CHECK(integrate([](double x) { return x; }, 1.0, 1.0) == 0.0);
}

TEST_CASE("integration is linear", "[numerics][quad][property]") {
    testing_support::Gen gen(11);
    for (int i = 0; i < 5; ++i) {
        const double a = gen.uniform(-3.0, 3.0);
        const double b = gen.uniform(-3.0, 3.0);
        const double s = gen.uniform(0.5, 3.0);
        auto f = [s](double x) { return std::exp(-s * x); };
        auto g = [](double x) { return 1.0 / (1.0 + x * x) / (1.0 + x); };
        const double lhs = integrate_semi_infinite([&](double x) { return a * f(x) + b * g(x); });
        const double rhs = a * integrate_semi_infinite(f) + b * integrate_semi_infinite(g);
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-8));
    }
}

TEST_CASE("integrate_semi_infinite gives up on a divergent integrand", "[numerics][quad]") {
    QuadSpec spec;
    spec.max_panels = 400;
    CHECK_THROWS_AS(integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x); }, spec),
                    efwe::Error);
}

TEST_CASE("minimize quadratic bowls", "[numerics][nm]") {
    auto bowl = [](std::span<const double> v) {
        return (v[0] - 3.0) * (v[0] - 3.0) + (v[1] + 1.0) * (v[1] + 1.0);
    };
    const auto r = minimize(bowl, {0.0, 0.0});
    CHECK(r.converged);
    CHECK_THAT(r.x[0], WithinAbs(3.0, 1e-6));
    CHECK_THAT(r.x[1], WithinAbs(-1.0, 1e-6));

    auto norm2 = [](std::span<const double> v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s;
    };
    const auto o = minimize(norm2, {1.0, 1.0, 1.0});
    for (double x : o.x) CHECK_THAT(x, WithinAbs(0.0, 1e-6));
}

TEST_CASE("minimize reaches the Rosenbrock valley floor from random starts", "[numerics][nm][property]") {
    auto rosen = [](std::span<const double> v) {
        return 100.0 * std::pow(v[1] - v[0] * v[0], 2) + std::pow(1.0 - v[0], 2);
    };
    testing_support::Gen gen(5);
    for (int i = 0; i < 10; ++i) {
        const auto r = minimize(rosen, {gen.uniform(-2.0, 2.0), gen.uniform(-1.0, 3.0)}, 1e-12);
        CHECK(r.converged);
        CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-5));
        CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-5));
    }
}

TEST_CASE("minimize treats NaN as infeasible and rejects bad starts", "[numerics][nm]") {
    auto f = [](std::span<const double> v) {
        return v[0] < 0.0 ? std::nan("") : (v[0] - 1.0) * (v[0] - 1.0);
    };
    CHECK_THAT(minimize(f, {0.5}).x[0], WithinAbs(1.0, 1e-6));
    CHECK_THROWS_AS(minimize(f, {std::nan("")}), DomainError);
}

TEST_CASE("kolmogorov_pvalue reference points", "[numerics][ks]") {
    CHECK(kolmogorov_pvalue(0.0, 10) == 1.0);
    CHECK(kolmogorov_pvalue(1.0, 50) < 1e-12);
    CHECK_THAT(kolmogorov_pvalue(0.13869, 50), WithinAbs(0.27, 0.02));
    CHECK_THAT(kolmogorov_pvalue(0.13869, 50), WithinAbs(0.27055, 5e-4));
    CHECK_THROWS_AS(kolmogorov_pvalue(-0.1, 10), DomainError);
    CHECK_THROWS_AS(kolmogorov_pvalue(0.1, 0), DomainError);
}

TEST_CASE("kolmogorov_pvalue decreases in d", "[numerics][ks][property]") {
    for (long n : {5L, 50L, 1000L}) {
        double prev = 1.0;
        for (int i = 1; i <= 200; ++i) {
            const double p = kolmogorov_pvalue(i / 200.0, n);
            CHECK(p <= prev);
            CHECK(p >= 0.0);
            prev = p;
        }
    }
}

TEST_CASE("normal_quantile", "[numerics]") {
    CHECK_THAT(normal_quantile(0.975), WithinAbs(1.959963984540054, 1e-13));
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK_THAT(normal_quantile(1e-10), WithinRel(-6.361340902404056, 1e-12));
    CHECK_THAT(normal_quantile(0.3), WithinAbs(-normal_quantile(0.7), 1e-15));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}
