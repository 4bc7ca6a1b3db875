#include "efwe/properties.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "efwe/errors.hpp"

namespace efwe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kModeGridPoints = 400;
constexpr double kModeGridLo = 1e-6;
constexpr double kModeGridHi = 1e6;

void require_x(double x, const char* op) {
    if (!(x > 0.0)) {
        std::ostringstream msg;
        msg << op << ": x must be > 0 (got " << x << ")";
        throw DomainError(msg.str());
    }
}

}  // namespace

double mode_equation(const EfweParams& p, double x) {
    require_x(x, "mode_equation");
    const double a = p.alpha();
    const double b = p.beta();
    const double z = a * x - b / x;
    const double ez = std::exp(z);
    // lambda e^{z + e^z} dwarfs e^z long before e^z overflows.
    if (ez > 700.0) return -kInf;
    const double pull = std::exp(std::log(p.lambda()) + z + ez);
    const double denom = a * x * x + b;
    return 1.0 + ez - pull - 2.0 * b * x / (denom * denom);
}

ModeResult mode(const EfweParams& p) {
    const double ratio = std::pow(kModeGridHi / kModeGridLo, 1.0 / (kModeGridPoints - 1));
    std::vector<double> grid(kModeGridPoints);
    std::vector<double> values(kModeGridPoints);
    for (int i = 0; i < kModeGridPoints; ++i) {
        grid[i] = kModeGridLo * std::pow(ratio, i);
        values[i] = mode_equation(p, grid[i]);
    }

    ModeResult result{0.0, false, {}};
    auto eq = [&p](double x) { return mode_equation(p, x); };
    for (int i = 0; i + 1 < kModeGridPoints; ++i) {
        const double lo = values[i];
        const double hi = values[i + 1];
        if (std::isnan(lo) || std::isnan(hi) || lo == 0.0) continue;
        if (std::signbit(lo) == std::signbit(hi) && hi != 0.0) continue;
        const double x =
            numerics::find_root(eq, {grid[i], grid[i + 1]}, 1e-14 * grid[i + 1]);
        const StationaryKind kind = lo > 0.0 ? StationaryKind::LocalMax : StationaryKind::LocalMin;
        result.stationary_points.push_back({x, log_pdf(p, x), kind});
    }

    int maxima = 0;
    double best = -kInf;
    for (const auto& sp : result.stationary_points) {
        if (sp.kind != StationaryKind::LocalMax) continue;
        ++maxima;
        if (sp.log_pdf > best) {
            best = sp.log_pdf;
            result.mode = sp.x;
        }
    }
    if (maxima == 0) {
        throw NoInteriorModeError("mode: no interior maximum of the density in [1e-6, 1e6]");
    }
    result.multimodal = maxima > 1;
    return result;
}

double median(const EfweParams& p) { return quantile(p, 0.5); }

double bowley_skewness(const EfweParams& p) {
    const double q1 = quantile(p, 0.25);
    const double q2 = quantile(p, 0.5);
    const double q3 = quantile(p, 0.75);
    return (q3 - 2.0 * q2 + q1) / (q3 - q1);
}

double moors_kurtosis(const EfweParams& p) {
    const double e1 = quantile(p, 0.125);
    const double e3 = quantile(p, 0.375);
    const double e5 = quantile(p, 0.625);
    const double e7 = quantile(p, 0.875);
    return (e7 - e5 - e3 + e1) / (quantile(p, 0.75) - quantile(p, 0.25));
}

double raw_moment(const EfweParams& p, int r, const numerics::QuadSpec& spec) {
    if (r < 0) {
        throw DomainError("raw_moment: order must be >= 0");
    }
    const double order = r;
    return numerics::integrate_semi_infinite(
        [&p, order](double x) {
            const double lf = log_pdf(p, x);
            return std::exp(order == 0.0 ? lf : order * std::log(x) + lf);
        },
        spec);
}

double mgf(const EfweParams& p, double t, const numerics::QuadSpec& spec) {
    if (!std::isfinite(t)) {
        throw DomainError("mgf: t must be finite");
    }
    return numerics::integrate_semi_infinite(
        [&p, t](double x) { return std::exp(t * x + log_pdf(p, x)); }, spec);
}

SeriesResult raw_moment_series(const EfweParams& p, int r, const SeriesTruncation& trunc) {
    if (r < 0) {
        throw DomainError("raw_moment_series: order must be >= 0");
    }
    if (trunc.max_i < 1 || trunc.max_j < 1 || trunc.max_k < 1 || !(trunc.term_floor > 0.0)) {
        throw DomainError("raw_moment_series: truncation limits must be >= 1");
    }
    const double log_a = std::log(p.alpha());
    const double log_b = std::log(p.beta());
    const double log_l = std::log(p.lambda());

    SeriesResult out{0.0, {}, 0.0, true, true, 0};
    double total = 0.0;

    for (int i = 0; i <= trunc.max_i; ++i) {
        double slice_i = 0.0;
        bool j_stopped = false;
        for (int j = 0; j <= trunc.max_j; ++j) {
            double slice_j = 0.0;
            bool k_stopped = false;
            for (int k = 0; k <= trunc.max_k; ++k) {
                const double log_pref = (i + 1) * log_l + k * log_b + j * std::log(i + 1.0) +
                                        k * std::log(j + 1.0) - std::lgamma(i + 1.0) -
                                        std::lgamma(j + 1.0) - std::lgamma(k + 1.0);
                const int ga = r - k + 1;  // argument of the first gamma factor
                const int gb = r - k - 1;  // argument of the second
                double bracket = 0.0;
                if (ga > 0) {
                    bracket += std::exp(log_pref + std::lgamma(ga) - (r - k) * log_a -
                                        ga * std::log(j + 1.0));
                } else {
                    ++out.terms_skipped;
                }
                if (gb > 0) {
                    bracket += std::exp(log_pref + log_b + std::lgamma(gb) - gb * log_a -
                                        gb * std::log(j + 1.0));
                } else {
                    ++out.terms_skipped;
                }
                const double term = ((i + k) % 2 == 0) ? bracket : -bracket;
                slice_j += term;
                if (ga <= 0 || std::abs(term) < trunc.term_floor) {
                    // Past k = r + 1 every factor is a pole; nothing remains.
                    k_stopped = true;
                    break;
                }
            }
            out.converged = out.converged && k_stopped;
            slice_i += slice_j;
            if (j > i + 1 && std::abs(slice_j) < trunc.term_floor) {
                j_stopped = true;
                break;
            }
        }
        out.converged = out.converged && j_stopped;
        total += slice_i;
        out.partial_sums.push_back(total);
        if (std::abs(slice_i) < trunc.term_floor) break;
        if (i == trunc.max_i) out.converged = false;
    }

    const auto& ps = out.partial_sums;
    for (std::size_t m = 1; m < ps.size(); ++m) {
        if (std::abs(ps[m]) < std::abs(ps[m - 1])) out.nondecreasing = false;
    }
    out.growth_ratio = ps.size() >= 2 && ps[ps.size() - 2] != 0.0
                           ? std::abs(ps.back()) / std::abs(ps[ps.size() - 2])
                           : 1.0;
    out.value = total;
    return out;
}

namespace {

void check_spec(OrderStatSpec spec) {
    if (spec.n < 1 || spec.r < 1 || spec.r > spec.n) {
        std::ostringstream msg;
        msg << "order statistic rank must satisfy 1 <= r <= n (r=" << spec.r << ", n=" << spec.n
            << ")";
        throw DomainError(msg.str());
    }
}

}  // namespace

double order_stat_pdf(const EfweParams& p, OrderStatSpec spec, double x) {
    check_spec(spec);
    const double lf = log_pdf(p, x);
    const double log_s = log_survival(p, x);
    const double log_f_cdf = std::log(-std::expm1(log_s));
    const int r = spec.r;
    const int n = spec.n;
    double log_val = std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(r)) -
                     std::lgamma(n - r + 1.0) + lf;
    if (r > 1) log_val += (r - 1) * log_f_cdf;
    if (n > r) log_val += (n - r) * log_s;
    return std::exp(log_val);
}

double order_stat_pdf_expanded(const EfweParams& p, OrderStatSpec spec, double x) {
    check_spec(spec);
    const long double f = pdf(p, x);
    const long double big_f = -std::expm1(static_cast<long double>(log_survival(p, x)));
    const int r = spec.r;
    const int n = spec.n;
    long double sum = 0.0L;
    for (int i = 0; i <= n - r; ++i) {
        const long double coef = std::exp(std::lgamma(n + 1.0L) - std::lgamma(i + 1.0L) -
                                          std::lgamma(static_cast<long double>(r)) -
                                          std::lgamma(n - r - i + 1.0L));
        const long double term = std::round(coef) * std::pow(big_f, i + r - 1);
        sum += (i % 2 == 0) ? term : -term;
    }
    return static_cast<double>(sum * f);
}

}  // namespace efwe
