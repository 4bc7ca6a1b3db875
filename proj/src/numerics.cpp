#include "efwe/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "efwe/errors.hpp"

namespace efwe::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double checked(const ScalarFn& f, double x) {
    const double y = f(x);
    if (std::isnan(y)) {
        std::ostringstream msg;
        msg << "function returned NaN at x = " << x;
        throw EvaluationError(msg.str());
    }
    return y;
}

}  // namespace

double find_root(const ScalarFn& f, Bracket bracket, double tol) {
    if (!(bracket.lo < bracket.hi)) {
        throw BracketError("find_root: bracket must satisfy lo < hi");
    }
    if (!(tol > 0.0)) {
        throw DomainError("find_root: tolerance must be positive");
    }
    double a = bracket.lo;
    double b = bracket.hi;
    double fa = checked(f, a);
    double fb = checked(f, b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb)) {
        std::ostringstream msg;
        msg << "find_root: no sign change on [" << a << ", " << b << "] (f = " << fa << ", "
            << fb << ")";
        throw BracketError(msg.str());
    }

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    double width = std::abs(b - a);
    int slow_steps = 0;

    for (int iter = 0; iter < 1000; ++iter) {
        if (std::signbit(fb) == std::signbit(fc)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) {
            return b;
        }

        const double new_width = std::abs(c - b);
        if (new_width > 0.5 * width) {
            ++slow_steps;
        } else {
            slow_steps = 0;
            width = new_width;
        }

        bool bisect = slow_steps >= 3;
        if (!bisect && std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            } else {
                p = -p;
            }
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                bisect = true;
            }
        } else {
            bisect = true;
        }
        if (bisect) {
            d = xm;
            e = d;
            if (slow_steps >= 3) {
                slow_steps = 0;
                width = new_width;
            }
        }

        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
        fb = checked(f, b);
    }
    return b;
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    int depth;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const ScalarFn& f, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f, center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = checked(f, center - dx);
        const double f2 = checked(f, center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    if (!std::isfinite(kronrod)) {
        std::ostringstream msg;
        msg << "integrand not finite on [" << a << ", " << b << "]";
        throw EvaluationError(msg.str());
    }
    return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

double adaptive(const ScalarFn& f, const std::vector<double>& breakpoints, const QuadSpec& spec) {
    if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_refinements < 1) {
        throw DomainError("QuadSpec: tolerances must be positive and max_refinements >= 1");
    }
    std::priority_queue<Panel> live;
    double total = 0.0;
    double total_error = 0.0;
    double frozen_value = 0.0;
    double frozen_error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        Panel p = gauss_kronrod(f, breakpoints[i], breakpoints[i + 1], 0);
        total += p.value;
        total_error += p.error;
        live.push(p);
    }

    auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

    while (total_error > target() && !live.empty() &&
           static_cast<int>(live.size()) < spec.max_panels) {
        Panel worst = live.top();
        live.pop();
        if (worst.depth >= spec.max_refinements) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            if (frozen_error > target()) break;
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gauss_kronrod(f, worst.a, mid, worst.depth + 1);
        Panel right = gauss_kronrod(f, mid, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        live.push(left);
        live.push(right);
    }

    // Re-sum to shed the cancellation accumulated by incremental updates.
    double resum = frozen_value;
    double err = frozen_error;
    while (!live.empty()) {
        resum += live.top().value;
        err += live.top().error;
        live.pop();
    }
    total = resum;

    if (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        std::ostringstream msg;
        msg << "adaptive quadrature did not converge: estimate " << total << ", error bound "
            << err;
        throw NonConvergenceError(msg.str(), total, err);
    }
    return total;
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, const QuadSpec& spec) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        return -integrate(f, b, a, spec);
    }
    std::vector<double> breaks(9);
    for (int i = 0; i <= 8; ++i) breaks[i] = a + (b - a) * i / 8.0;
    return adaptive(f, breaks, spec);
}

double integrate_semi_infinite(const ScalarFn& f, const QuadSpec& spec) {
    auto g = [&f](double t) {
        const double one_minus = 1.0 - t;
        const double x = t / one_minus;
        const double y = f(x);
        if (y == 0.0) return 0.0;
        return y / (one_minus * one_minus);
    };
    // Initial panels at x = 10^k, four per decade over [1e-6, 1e6], so narrow
    // features anywhere in that range are seen by the first pass.
    std::vector<double> breaks{0.0};
    for (int k = -24; k <= 24; ++k) {
        const double x = std::pow(10.0, k / 4.0);
        breaks.push_back(x / (1.0 + x));
    }
    breaks.push_back(1.0);
    return adaptive(g, breaks, spec);
}

MinimizeResult minimize(const VectorFn& objective, std::vector<double> init, double tol,
                        const MinimizeOptions& options) {
    const std::size_t dim = init.size();
    if (dim == 0) {
        throw DomainError("minimize: empty starting point");
    }
    MinimizeResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double v = objective(std::span<const double>(x));
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    if (!std::isfinite(eval(init))) {
        throw DomainError("minimize: objective not finite at the starting point");
    }

    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    std::vector<double> best = init;
    bool converged = false;

    for (int round = 0; round <= options.restarts; ++round) {
        std::vector<std::vector<double>> simplex(dim + 1, best);
        for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
        std::vector<double> values(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);
        std::vector<std::size_t> order(dim + 1);

        converged = false;
        while (result.iterations < options.max_iterations) {
            for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
            const std::size_t lo = order.front();
            const std::size_t hi = order.back();
            const std::size_t second = order[dim - 1];

            double diameter = 0.0;
            for (std::size_t i = 0; i <= dim; ++i) {
                for (std::size_t k = 0; k < dim; ++k) {
                    diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[lo][k]));
                }
            }
            if (diameter < tol && std::abs(values[hi] - values[lo]) < tol) {
                converged = true;
                break;
            }
            ++result.iterations;

            std::vector<double> centroid(dim, 0.0);
            for (std::size_t i = 0; i <= dim; ++i) {
                if (i == hi) continue;
                for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
            }
            for (auto& c : centroid) c /= static_cast<double>(dim);

            auto along = [&](double coef) {
                std::vector<double> p(dim);
                for (std::size_t k = 0; k < dim; ++k) {
                    p[k] = centroid[k] + coef * (simplex[hi][k] - centroid[k]);
                }
                return p;
            };

            auto reflected = along(-kReflect);
            const double fr = eval(reflected);
            if (fr < values[lo]) {
                auto expanded = along(-kReflect * kExpand);
                const double fe = eval(expanded);
                if (fe < fr) {
                    simplex[hi] = std::move(expanded);
                    values[hi] = fe;
                } else {
                    simplex[hi] = std::move(reflected);
                    values[hi] = fr;
                }
                continue;
            }
            if (fr < values[second]) {
                simplex[hi] = std::move(reflected);
                values[hi] = fr;
                continue;
            }
            // Outside contraction when the reflection beats the worst vertex,
            // inside contraction otherwise.
            const bool outside = fr < values[hi];
            auto contracted = along(outside ? -kReflect * kContract : kContract);
            const double fc = eval(contracted);
            if (fc < (outside ? fr : values[hi])) {
                simplex[hi] = std::move(contracted);
                values[hi] = fc;
                continue;
            }
            for (std::size_t i = 0; i <= dim; ++i) {
                if (i == lo) continue;
                for (std::size_t k = 0; k < dim; ++k) {
                    simplex[i][k] = simplex[lo][k] + kShrink * (simplex[i][k] - simplex[lo][k]);
                }
                values[i] = eval(simplex[i]);
            }
        }

        const auto it = std::min_element(values.begin(), values.end());
        const std::vector<double> candidate = simplex[it - values.begin()];
        const double candidate_value = *it;
        const bool improved = round == 0 || candidate_value < result.value - tol;
        if (round == 0 || candidate_value < result.value) {
            best = candidate;
            result.value = candidate_value;
        }
        if (!converged || !improved) break;
    }

    result.x = best;
    result.converged = converged;
    return result;
}

double kolmogorov_pvalue(double d, long n) {
    if (std::isnan(d) || d < 0.0 || d > 1.0) {
        throw DomainError("kolmogorov_pvalue: statistic must lie in [0, 1]");
    }
    if (n < 1) {
        throw DomainError("kolmogorov_pvalue: sample size must be >= 1");
    }
    const double rn = std::sqrt(static_cast<double>(n));
    const double s = d * (rn + 0.12 + 0.11 / rn);
    if (s == 0.0) return 1.0;

    double p;
    if (s < 1.18) {
        // Jacobi theta form; converges fast where the alternating series does not.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double sum = 0.0;
        for (int k = 1; k < 100; ++k) {
            const double m = 2.0 * k - 1.0;
            const double term = std::exp(-m * m * pi2 / (8.0 * s * s));
            sum += term;
            if (term < 1e-12 * sum || term == 0.0) break;
        }
        p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / s * sum;
    } else {
        double sum = 0.0;
        for (int k = 1; k < 100; ++k) {
            const double term = std::exp(-2.0 * k * k * s * s);
            sum += (k % 2 == 1) ? term : -term;
            if (term < 1e-12) break;
        }
        p = 2.0 * sum;
    }
    return std::clamp(p, 0.0, 1.0);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: p must lie in (0, 1)");
    }
    constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                            1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                            6.680131188771972e+01, -1.328068155288572e+01};
    constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                            -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double dd[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace efwe::numerics
