#pragma once

// Shared numerical kernels: bracketed root finding, quadrature over (0, inf),
// Nelder-Mead minimisation, the Kolmogorov distribution tail and the
// standard-normal quantile.

#include <functional>
#include <span>
#include <vector>

namespace efwe::numerics {

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(std::span<const double>)>;

struct Bracket {
    double lo;
    double hi;
};

/// Brent's method (inverse quadratic / secant with bisection safeguard).
/// Falls back to a pure bisection step whenever three consecutive steps fail
/// to halve the bracket. Returns once the bracket is no wider than `tol`.
double find_root(const ScalarFn& f, Bracket bracket, double tol = 1e-12);

struct QuadSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    /// Maximum bisection depth of any panel.
    int max_refinements = 60;
    /// Hard cap on the number of live panels.
    int max_panels = 5000;
};

/// Integral of f over [a, b] by globally adaptive Gauss-Kronrod (7, 15).
double integrate(const ScalarFn& f, double a, double b, const QuadSpec& spec = {});

/// Integral of f over (0, inf) via x = t / (1 - t) and adaptive panels on
/// (0, 1). Throws NonConvergenceError carrying the best estimate when the
/// tolerance cannot be met.
double integrate_semi_infinite(const ScalarFn& f, const QuadSpec& spec = {});

struct MinimizeOptions {
    int max_iterations = 20000;
    /// Edge length of the initial simplex along each coordinate.
    double initial_step = 0.1;
    /// Number of simplex rebuilds around the incumbent after convergence.
    int restarts = 2;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex minimisation (reflect / expand / contract / shrink).
/// Converged when both the simplex diameter and the spread of objective
/// values fall below `tol`. On iteration cap the best vertex is returned with
/// `converged == false`.
MinimizeResult minimize(const VectorFn& objective, std::vector<double> init, double tol = 1e-10,
                        const MinimizeOptions& options = {});

/// Asymptotic Kolmogorov p-value with Stephens' correction
/// s = d (sqrt(n) + 0.12 + 0.11 / sqrt(n)).
double kolmogorov_pvalue(double d, long n);

/// Inverse of the standard normal cdf. Acklam's rational approximation
/// followed by one Halley step against erfc.
double normal_quantile(double p);

}  // namespace efwe::numerics
