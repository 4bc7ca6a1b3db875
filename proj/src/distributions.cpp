#include "efwe/distributions.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "efwe/errors.hpp"

namespace efwe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_x(double x, const char* op) {
    if (!(x > 0.0) || std::isnan(x)) {
        std::ostringstream msg;
        msg << op << ": x must be > 0 (got " << x << ")";
        throw DomainError(msg.str());
    }
}

// Shared pieces of every EFWE evaluator at a point x > 0.
struct Kernel {
    double z;         // alpha x - beta / x
    double ez;        // e^z
    double log_cum;   // ln(lambda e^{e^z}) = ln lambda + e^z
    double cum;       // lambda e^{e^z}, saturates to +inf
    double log_slope; // ln(alpha + beta / x^2)
};

Kernel kernel(const EfweParams& p, double x, const char* op) {
    require_positive_x(x, op);
    Kernel k{};
    k.z = p.alpha() * x - p.beta() / x;
    k.ez = std::exp(k.z);
    k.log_cum = std::log(p.lambda()) + k.ez;
    k.cum = std::exp(k.log_cum);
    // ln(alpha x^2 + beta) - 2 ln x stays finite where beta / x^2 overflows.
    k.log_slope = std::log(p.alpha() * x * x + p.beta()) - 2.0 * std::log(x);
    return k;
}

}  // namespace

EfweParams::EfweParams(double alpha, double beta, double lambda)
    : alpha_(alpha), beta_(beta), lambda_(lambda) {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(alpha) || !ok(beta) || !ok(lambda)) {
        std::ostringstream msg;
        msg << "EFWE parameters must be finite and > 0 (alpha=" << alpha << ", beta=" << beta
            << ", lambda=" << lambda << ")";
        throw DomainError(msg.str());
    }
}

double link(const EfweParams& p, double x) {
    require_positive_x(x, "link");
    return p.alpha() * x - p.beta() / x;
}

double cdf(const EfweParams& p, double x) {
    const Kernel k = kernel(p, x, "cdf");
    return -std::expm1(-k.cum);
}

double log_pdf(const EfweParams& p, double x) {
    const Kernel k = kernel(p, x, "log_pdf");
    if (k.cum == kInf) return -kInf;
    return std::log(p.lambda()) + k.log_slope + k.z + k.ez - k.cum;
}

double pdf(const EfweParams& p, double x) { return std::exp(log_pdf(p, x)); }

double log_survival(const EfweParams& p, double x) {
    const Kernel k = kernel(p, x, "log_survival");
    return -k.cum;
}

double survival(const EfweParams& p, double x) { return std::exp(log_survival(p, x)); }

double log_hazard(const EfweParams& p, double x) {
    const Kernel k = kernel(p, x, "log_hazard");
    return std::log(p.lambda()) + k.log_slope + k.z + k.ez;
}

double hazard(const EfweParams& p, double x) { return std::exp(log_hazard(p, x)); }

double reversed_hazard(const EfweParams& p, double x) {
    const Kernel k = kernel(p, x, "reversed_hazard");
    if (k.cum == kInf) return 0.0;
    const double log_f = std::log(p.lambda()) + k.log_slope + k.z + k.ez - k.cum;
    const double log_cdf = std::log(-std::expm1(-k.cum));
    return std::exp(log_f - log_cdf);
}

double cumulative_hazard(const EfweParams& p, double x) { return -log_survival(p, x); }

double defect(const EfweParams& p) { return -std::expm1(-p.lambda()); }

double quantile_at_cumulative_hazard(const EfweParams& p, double cumulative_hazard) {
    const double lambda = p.lambda();
    if (!(cumulative_hazard > lambda)) {
        std::ostringstream msg;
        msg << "quantile: cumulative hazard " << cumulative_hazard
            << " is not above lambda = " << lambda << "; the quantile is not in (0, inf)";
        throw BelowSupportError(msg.str(), defect(p));
    }
    if (cumulative_hazard == kInf) return kInf;
    // k = ln ln(H / lambda), with ln(H / lambda) taken through log1p near H = lambda.
    const double k = std::log(std::log1p((cumulative_hazard - lambda) / lambda));
    const double disc = std::sqrt(k * k + 4.0 * p.alpha() * p.beta());
    // Both forms are the positive root; pick the one free of cancellation.
    if (k >= 0.0) return (k + disc) / (2.0 * p.alpha());
    return 2.0 * p.beta() / (disc - k);
}

double quantile(const EfweParams& p, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream msg;
        msg << "quantile: probability must lie in (0, 1) (got " << q << ")";
        throw DomainError(msg.str());
    }
    const double threshold = defect(p);
    if (q <= threshold) {
        std::ostringstream msg;
        msg << "quantile: q = " << q << " is at or below F(0+) = " << threshold;
        throw BelowSupportError(msg.str(), threshold);
    }
    return quantile_at_cumulative_hazard(p, -std::log1p(-q));
}

std::vector<double> sample(const EfweParams& p, long n, std::uint64_t seed, SamplePolicy policy) {
    if (n < 0) {
        throw DomainError("sample: n must be >= 0");
    }
    std::mt19937_64 rng(seed);
    // Open-interval uniform from the top 53 bits; independent of the standard
    // library's distribution implementation so streams match across platforms.
    auto uniform = [&rng] {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    };

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    const double threshold = defect(p);
    for (long i = 0; i < n; ++i) {
        const double u = uniform();
        if (policy == SamplePolicy::Conditional) {
            // U on (F(0+), 1) is H = lambda + E with E ~ Exp(1).
            out.push_back(quantile_at_cumulative_hazard(p, p.lambda() - std::log(u)));
        } else {
            if (u <= threshold) {
                std::ostringstream msg;
                msg << "sample: draw " << i << " has U = " << u << " inside the origin mass "
                    << threshold << " = 1 - exp(-lambda)";
                throw DefectError(msg.str(), threshold);
            }
            out.push_back(quantile(p, u));
        }
    }
    return out;
}

std::string_view to_string(RefFamily family) {
    switch (family) {
        case RefFamily::Fwe: return "fwe";
        case RefFamily::Weibull: return "weibull";
        case RefFamily::Lfr: return "lfr";
    }
    return "unknown";
}

RefModel::RefModel(RefFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    if (params_.size() != 2) {
        throw DomainError("RefModel: every reference family takes exactly two parameters");
    }
    const double first = params_[0];
    const double second = params_[1];
    const bool finite = std::isfinite(first) && std::isfinite(second);
    const bool valid = family_ == RefFamily::Lfr ? (first > 0.0 && second >= 0.0)
                                                 : (first > 0.0 && second > 0.0);
    if (!finite || !valid) {
        std::ostringstream msg;
        msg << "RefModel(" << to_string(family_) << "): invalid parameters (" << first << ", "
            << second << ")";
        throw DomainError(msg.str());
    }
}

double ref_log_survival(const RefModel& model, double x) {
    require_positive_x(x, "ref_log_survival");
    const double p0 = model.params()[0];
    const double p1 = model.params()[1];
    switch (model.family()) {
        case RefFamily::Fwe: return -std::exp(p0 * x - p1 / x);
        case RefFamily::Weibull: return -std::pow(x / p0, p1);
        case RefFamily::Lfr: return -p0 * x - 0.5 * p1 * x * x;
    }
    return 0.0;
}

double ref_cdf(const RefModel& model, double x) {
    return -std::expm1(ref_log_survival(model, x));
}

namespace {

double ref_log_hazard(const RefModel& model, double x) {
    const double p0 = model.params()[0];
    const double p1 = model.params()[1];
    switch (model.family()) {
        case RefFamily::Fwe:
            return std::log(p0 * x * x + p1) - 2.0 * std::log(x) + p0 * x - p1 / x;
        case RefFamily::Weibull:
            return std::log(p1) - std::log(p0) + (p1 - 1.0) * std::log(x / p0);
        case RefFamily::Lfr: return std::log(p0 + p1 * x);
    }
    return 0.0;
}

}  // namespace

double ref_logpdf(const RefModel& model, double x) {
    require_positive_x(x, "ref_logpdf");
    const double log_s = ref_log_survival(model, x);
    if (log_s == -kInf) return -kInf;
    return ref_log_hazard(model, x) + log_s;
}

double ref_hazard(const RefModel& model, double x) {
    require_positive_x(x, "ref_hazard");
    return std::exp(ref_log_hazard(model, x));
}

}  // namespace efwe
