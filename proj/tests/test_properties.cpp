#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "efwe/errors.hpp"
#include "efwe/numerics.hpp"
#include "efwe/properties.hpp"
#include "support.hpp"

using namespace efwe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testing_support::Gen;

namespace {

struct Row {
    double a, b, l, median, mode;
};

// Median and mode table for six parameter sets.
constexpr Row kTable[] = {
    {0.015, 0.381, 0.076, 53.3576, 10.6657}, {0.158, 0.158, 0.273, 0.801066, 1.96923},
    {0.700, 1.000, 0.150, 1.537340, 1.87122}, {1.000, 0.700, 0.130, 1.132920, 1.35312},
    {1.000, 0.800, 0.200, 1.009750, 1.27259}, {1.200, 1.000, 0.100, 1.228750, 1.38465},
};

bool has_point(const ModeResult& m, double x, StationaryKind kind, double tol) {
    for (const auto& sp : m.stationary_points) {
        if (sp.kind == kind && std::abs(sp.x - x) <= tol) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("medians of the table", "[properties][median]") {
    for (const auto& r : kTable) {
        CHECK_THAT(median(EfweParams(r.a, r.b, r.l)), WithinRel(r.median, 1e-5));
    }
    CHECK_THAT(median(EfweParams(0.7, 1.0, 0.15)), WithinAbs(1.53734, 1e-4));
    CHECK_THAT(median(EfweParams(1.2, 1.0, 0.1)), WithinAbs(1.22875, 1e-4));
    CHECK_THROWS_AS(median(EfweParams(1.0, 1.0, 0.8)), BelowSupportError);
}

TEST_CASE("unimodal rows of the table", "[properties][mode]") {
    for (int i = 2; i < 6; ++i) {
        const auto& r = kTable[i];
        const ModeResult m = mode(EfweParams(r.a, r.b, r.l));
        CHECK_FALSE(m.multimodal);
        CHECK_THAT(m.mode, WithinRel(r.mode, 1e-4));
    }
    CHECK_THAT(mode(EfweParams(1.0, 0.7, 0.13)).mode, WithinAbs(1.35312, 0.005));
}

TEST_CASE("bimodal rows: the tabulated values are interior minima", "[properties][mode]") {
    const ModeResult m1 = mode(EfweParams(0.015, 0.381, 0.076));
    CHECK(m1.multimodal);
    CHECK(has_point(m1, 10.6657, StationaryKind::LocalMin, 0.01));
    CHECK(has_point(m1, 0.22278, StationaryKind::LocalMax, 1e-4));
    CHECK(has_point(m1, 70.7209, StationaryKind::LocalMax, 1e-3));
    // The spike near the origin is the taller of the two.
    CHECK_THAT(m1.mode, WithinRel(0.22278, 1e-4));

    const ModeResult m2 = mode(EfweParams(0.158, 0.158, 0.273));
    CHECK(m2.multimodal);
    CHECK(has_point(m2, 1.96923, StationaryKind::LocalMin, 1e-4));
    CHECK(has_point(m2, 0.089723, StationaryKind::LocalMax, 1e-5));
    CHECK(has_point(m2, 3.53118, StationaryKind::LocalMax, 1e-4));
}

TEST_CASE("mode is a local maximum of the density", "[properties][mode][property]") {
    Gen gen(21);
    for (int i = 0; i < 20; ++i) {
        const EfweParams p = gen.params();
        const double x = mode(p).mode;
        CHECK(log_pdf(p, x) >= log_pdf(p, x * (1 + 1e-3)));
        CHECK(log_pdf(p, x) >= log_pdf(p, x * (1 - 1e-3)));
        CHECK(std::abs(mode_equation(p, x)) < 1e-8);
    }
}

TEST_CASE("Bowley skewness", "[properties][shape]") {
    Gen gen(22);
    for (int i = 0; i < 20; ++i) {
        const EfweParams p(gen.log_uniform(0.2, 2.0), gen.log_uniform(0.2, 2.0),
                           gen.uniform(0.01, 0.13));
        const double sk = bowley_skewness(p);
        CHECK(sk > -1.0);
        CHECK(sk < 1.0);

        // Same measure from quartiles found by root-finding on the cdf.
        auto inv = [&](double q) {
            return numerics::find_root([&](double x) { return cdf(p, x) - q; }, {1e-6, 1e3}, 1e-13);
        };
        const double q1 = inv(0.25), q2 = inv(0.5), q3 = inv(0.75);
        CHECK_THAT(sk, WithinAbs((q3 - 2 * q2 + q1) / (q3 - q1), 1e-8));
    }
}

TEST_CASE("Moors kurtosis from octiles", "[properties][shape]") {
    const EfweParams p(1.0, 1.0, 0.05);
    auto q = [&](double u) { return quantile(p, u); };
    const double k = moors_kurtosis(p);
    CHECK(std::isfinite(k));
    CHECK_THAT(k, WithinAbs((q(0.875) - q(0.625) - q(0.375) + q(0.125)) / (q(0.75) - q(0.25)), 1e-12));
    CHECK_THROWS_AS(moors_kurtosis(EfweParams(1.0, 1.0, 0.5)), BelowSupportError);
}

TEST_CASE("integral of the density is exp(-lambda)", "[properties][moments][property]") {
    Gen gen(23);
    for (int i = 0; i < 10; ++i) {
        const EfweParams p = gen.params();
        CHECK_THAT(raw_moment(p, 0), WithinAbs(std::exp(-p.lambda()), 1e-8));
    }
    CHECK_THAT(raw_moment(EfweParams(1, 1, 1), 0), WithinAbs(std::exp(-1.0), 1e-8));
    CHECK_THROWS_AS(raw_moment(EfweParams(1, 1, 1), -1), DomainError);
}

TEST_CASE("first moment agrees with a Monte Carlo mean", "[properties][moments]") {
    const EfweParams p(0.015, 0.381, 0.076);
    const auto xs = sample(p, 1000000, 99, SamplePolicy::Conditional);
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (n - 1) / n);
    const double mass = std::exp(-p.lambda());
    CHECK(std::abs(raw_moment(p, 1) - mean * mass) < 3.0 * se * mass);
}

TEST_CASE("second moment dominates the squared first", "[properties][moments]") {
    Gen gen(24);
    for (int i = 0; i < 5; ++i) {
        const EfweParams p = gen.params();
        const double m1 = raw_moment(p, 1);
        CHECK(raw_moment(p, 2) >= m1 * m1 / std::exp(-p.lambda()));
    }
}

TEST_CASE("moment series misses the quadrature value", "[properties][series]") {
    // Regression baseline: with the gamma poles skipped the partial sums
    // oscillate and then settle on a value that is not the first moment.
    const EfweParams p(1.0, 1.0, 1.0);
    const SeriesResult s = raw_moment_series(p, 1);
    CHECK_FALSE(s.nondecreasing);
    CHECK_THAT(s.value, WithinAbs(0.166234, 1e-6));
    CHECK(s.terms_skipped > 0);
    CHECK(s.partial_sums.size() >= 2);
    CHECK(std::abs(s.value - raw_moment(p, 1)) > 0.01 * raw_moment(p, 1));
    CHECK_THROWS_AS(raw_moment_series(p, -1), DomainError);
}

TEST_CASE("moment generating function", "[properties][mgf]") {
    const EfweParams p(1.0, 1.0, 1.0);
    CHECK_THAT(mgf(p, 0.0), WithinAbs(std::exp(-1.0), 1e-8));
    const double h = 1e-4;
    CHECK_THAT((mgf(p, h) - mgf(p, -h)) / (2 * h), WithinRel(raw_moment(p, 1), 1e-5));
    const double m = mgf(p, -1.0);
    CHECK(m > 0.0);
    CHECK(m < std::exp(-1.0));
}

TEST_CASE("order statistic densities", "[properties][order]") {
    Gen gen(25);
    const int n = 7;
    for (int i = 0; i < 20; ++i) {
        const EfweParams p = gen.params();
        const double x = gen.bulk_point(p);
        const double f = pdf(p, x);
        const double F = cdf(p, x);
        CHECK_THAT(order_stat_pdf(p, {n, n}, x), WithinRel(n * std::pow(F, n - 1) * f, 1e-12));
        CHECK_THAT(order_stat_pdf(p, {1, n}, x), WithinRel(n * std::pow(1 - F, n - 1) * f, 1e-10));
        double total = 0.0;
        for (int r = 1; r <= n; ++r) total += order_stat_pdf(p, {r, n}, x);
        CHECK_THAT(total, WithinRel(n * f, 1e-10));
    }
    CHECK_THROWS_AS(order_stat_pdf(EfweParams(1, 1, 1), {0, 3}, 1.0), DomainError);
    CHECK_THROWS_AS(order_stat_pdf(EfweParams(1, 1, 1), {4, 3}, 1.0), DomainError);
}

TEST_CASE("expanded order statistic density matches the Beta form", "[properties][order]") {
    // The alternating sum cancels badly when F is small; compare where it is
    // well conditioned.
    Gen gen(26);
    for (int i = 0; i < 20; ++i) {
        const EfweParams p = gen.params();
        const double x = gen.bulk_point(p);
        if (cdf(p, x) < 0.3) continue;
        for (int r = 1; r <= 5; ++r) {
            CHECK_THAT(order_stat_pdf_expanded(p, {r, 5}, x),
                       WithinRel(order_stat_pdf(p, {r, 5}, x), 1e-8));
        }
    }
}
