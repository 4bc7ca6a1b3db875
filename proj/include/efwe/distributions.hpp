#pragma once

// The exponential flexible Weibull extension (EFWE) family
//
//     F(x) = 1 - exp(-lambda * exp(exp(alpha * x - beta / x))),  x > 0,
//
// and the two-parameter reference families (FWE, Weibull, LFR) it is compared
// against.
//
// F(0+) = 1 - exp(-lambda) > 0, so the density carries mass exp(-lambda) on
// (0, inf). The formulas are implemented as written; `defect()` reports the
// missing mass and `SamplePolicy` makes the sampler's treatment of it explicit.
//
// Everything downstream of the link z = alpha x - beta / x is evaluated from
// z and e^z in log space: exp(exp(z)) overflows a double once z > 6.56.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace efwe {

class EfweParams {
public:
    /// Throws DomainError unless all three parameters are finite and > 0.
    EfweParams(double alpha, double beta, double lambda);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double lambda() const noexcept { return lambda_; }

    friend bool operator==(const EfweParams&, const EfweParams&) = default;

private:
    double alpha_;
    double beta_;
    double lambda_;
};

enum class SamplePolicy {
    /// Uniforms drawn on (F(0+), 1): the law of X given X > 0.
    Conditional,
    /// Uniforms drawn on (0, 1); a draw inside the origin mass is an error.
    StrictPaper,
};

/// z = alpha x - beta / x.
double link(const EfweParams& p, double x);

double cdf(const EfweParams& p, double x);
double pdf(const EfweParams& p, double x);
double log_pdf(const EfweParams& p, double x);
double survival(const EfweParams& p, double x);
double log_survival(const EfweParams& p, double x);
double hazard(const EfweParams& p, double x);
double log_hazard(const EfweParams& p, double x);
double reversed_hazard(const EfweParams& p, double x);

/// -log S(x) = lambda e^{e^z}. The printed closed form has H(0+) = lambda
/// rather than 0; this is the version consistent with S and with H' = h.
double cumulative_hazard(const EfweParams& p, double x);

/// Probability mass F(0+) = 1 - exp(-lambda) not carried by the density.
double defect(const EfweParams& p);

/// Positive root of alpha x^2 - k(q) x - beta = 0 with
/// k(q) = ln ln(-ln(1 - q) / lambda). Requires defect(p) < q < 1.
double quantile(const EfweParams& p, double q);

/// Quantile expressed through the cumulative hazard level H = -ln(1 - q).
/// Requires H > lambda. Keeps full precision for q close to 1.
double quantile_at_cumulative_hazard(const EfweParams& p, double cumulative_hazard);

/// Inverse-transform sample of size n; deterministic for a fixed seed.
std::vector<double> sample(const EfweParams& p, long n, std::uint64_t seed,
                           SamplePolicy policy = SamplePolicy::Conditional);

// ---------------------------------------------------------------------------
// Reference families

enum class RefFamily { Fwe, Weibull, Lfr };

std::string_view to_string(RefFamily family);

/// FWE: (alpha, beta), S(x) = exp(-e^{alpha x - beta / x}).
/// Weibull: (scale, shape), S(x) = exp(-(x / scale)^shape).
/// LFR: (a, b), hazard a + b x; b = 0 reduces to the exponential.
class RefModel {
public:
    RefModel(RefFamily family, std::vector<double> params);

    RefFamily family() const noexcept { return family_; }
    const std::vector<double>& params() const noexcept { return params_; }

private:
    RefFamily family_;
    std::vector<double> params_;
};

double ref_cdf(const RefModel& model, double x);
double ref_log_survival(const RefModel& model, double x);
double ref_logpdf(const RefModel& model, double x);
double ref_hazard(const RefModel& model, double x);

}  // namespace efwe
