#include "efwe/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "efwe/errors.hpp"
#include "efwe/numerics.hpp"

namespace efwe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sum exp(v_i)), tolerating -inf entries.
double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// ln(e^y - 1) for y >= 0.
double log_expm1(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

// Per-observation terms that do not involve lambda.
struct Terms {
    double sum_log_slope = 0.0;  // sum ln(alpha + beta / x^2)
    double sum_z = 0.0;
    double sum_ez = 0.0;
    std::vector<double> ez;      // e^{z_i}
};

Terms terms(const Dataset& data, double alpha, double beta) {
    Terms t;
    t.ez.reserve(data.size());
    for (double x : data.values()) {
        const double z = alpha * x - beta / x;
        const double ez = std::exp(z);
        t.sum_log_slope += std::log(alpha * x * x + beta) - 2.0 * std::log(x);
        t.sum_z += z;
        t.sum_ez += ez;
        t.ez.push_back(ez);
    }
    return t;
}

}  // namespace

std::string_view to_string(Family family) {
    switch (family) {
        case Family::Efwe: return "efwe";
        case Family::Fwe: return "fwe";
        case Family::Weibull: return "weibull";
        case Family::Lfr: return "lfr";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    if (name == "efwe") return Family::Efwe;
    if (name == "fwe") return Family::Fwe;
    if (name == "weibull") return Family::Weibull;
    if (name == "lfr") return Family::Lfr;
    throw DomainError("unknown model '" + std::string(name) + "' (expected efwe|fwe|weibull|lfr)");
}

int parameter_count(Family family) { return family == Family::Efwe ? 3 : 2; }

std::vector<std::string> parameter_names(Family family) {
    switch (family) {
        case Family::Efwe: return {"alpha", "beta", "lambda"};
        case Family::Fwe: return {"alpha", "beta"};
        case Family::Weibull: return {"scale", "shape"};
        case Family::Lfr: return {"a", "b"};
    }
    return {};
}

EfweParams FitResult::efwe() const {
    if (family != Family::Efwe) throw DomainError("FitResult: not an EFWE fit");
    return EfweParams(params.at(0), params.at(1), params.at(2));
}

RefModel FitResult::ref_model() const {
    switch (family) {
        case Family::Fwe: return RefModel(RefFamily::Fwe, params);
        case Family::Weibull: return RefModel(RefFamily::Weibull, params);
        case Family::Lfr: return RefModel(RefFamily::Lfr, params);
        case Family::Efwe: break;
    }
    throw DomainError("FitResult: EFWE fit has no reference model");
}

std::function<double(double)> FitResult::cdf() const {
    if (family == Family::Efwe) {
        return [p = efwe()](double x) { return efwe::cdf(p, x); };
    }
    return [m = ref_model()](double x) { return ref_cdf(m, x); };
}

std::function<double(double)> FitResult::survival() const {
    if (family == Family::Efwe) {
        return [p = efwe()](double x) { return efwe::survival(p, x); };
    }
    return [m = ref_model()](double x) { return std::exp(ref_log_survival(m, x)); };
}

// ---------------------------------------------------------------------------
// EFWE likelihood

double loglik(const Dataset& data, const EfweParams& p, Likelihood kind) {
    const Terms t = terms(data, p.alpha(), p.beta());
    const double log_l = std::log(p.lambda());
    const double n = static_cast<double>(data.size());
    double pull = 0.0;  // lambda * sum e^{e^z}
    for (double ez : t.ez) pull += std::exp(log_l + ez);
    double ll = n * log_l + t.sum_log_slope + t.sum_z + t.sum_ez - pull;
    if (kind == Likelihood::Conditional) ll += n * p.lambda();
    return ll;
}

std::array<double, 3> score(const Dataset& data, const EfweParams& p, Likelihood kind) {
    const double a = p.alpha();
    const double b = p.beta();
    const double log_l = std::log(p.lambda());
    double ga = 0.0;
    double gb = 0.0;
    double sum_w = 0.0;
    for (double x : data.values()) {
        const double z = a * x - b / x;
        const double ez = std::exp(z);
        const double lew = std::exp(log_l + z + ez);  // lambda e^z e^{e^z}
        const double denom = b + a * x * x;
        ga += x * x / denom + x + x * ez - x * lew;
        gb += 1.0 / denom - 1.0 / x - ez / x + lew / x;
        sum_w += std::exp(ez);
    }
    const double n = static_cast<double>(data.size());
    double gl = n / p.lambda() - sum_w;
    if (kind == Likelihood::Conditional) gl += n;
    return {ga, gb, gl};
}

ProfileLambda profile_lambda(const Dataset& data, double alpha, double beta, Likelihood kind) {
    const Terms t = terms(data, alpha, beta);
    std::vector<double> logs = t.ez;  // ln e^{e^z} = e^z
    if (kind == Likelihood::Conditional) {
        for (double& v : logs) v = log_expm1(v);
    }
    const double log_lambda = std::log(static_cast<double>(data.size())) - log_sum_exp(logs);
    ProfileLambda out{std::exp(log_lambda), log_lambda, false};
    constexpr double kTiny = std::numeric_limits<double>::min();
    constexpr double kHuge = std::numeric_limits<double>::max();
    if (!(out.lambda >= kTiny)) {
        out.lambda = kTiny;
        out.saturated = true;
    } else if (!(out.lambda <= kHuge)) {
        out.lambda = kHuge;
        out.saturated = true;
    }
    return out;
}

double profiled_loglik(const Dataset& data, double alpha, double beta, Likelihood kind) {
    const ProfileLambda pl = profile_lambda(data, alpha, beta, kind);
    const Terms t = terms(data, alpha, beta);
    const double n = static_cast<double>(data.size());
    // At lambda hat the lambda-linear part of the likelihood equals -n.
    return n * pl.log_lambda + t.sum_log_slope + t.sum_z + t.sum_ez - n;
}

namespace {

template <int K>
Eigen::Matrix<double, K, K> checked_inverse(const Eigen::Matrix<double, K, K>& info,
                                            const char* what) {
    if (!info.allFinite()) {
        throw ConditioningError(std::string(what) + ": information matrix is not finite", {});
    }
    Eigen::LLT<Eigen::Matrix<double, K, K>> llt(info);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, K, K>> es(info);
        std::vector<double> eig(es.eigenvalues().data(), es.eigenvalues().data() + K);
        std::ostringstream msg;
        msg << what << ": information matrix is not positive definite (eigenvalues";
        for (double e : eig) msg << ' ' << e;
        msg << ")";
        throw ConditioningError(msg.str(), std::move(eig));
    }
    Eigen::Matrix<double, K, K> inv = llt.solve(Eigen::Matrix<double, K, K>::Identity());
    return 0.5 * (inv + inv.transpose());
}

}  // namespace

Eigen::Matrix3d hessian(const Dataset& data, const EfweParams& p) {
    const double a = p.alpha();
    const double b = p.beta();
    const double lam = p.lambda();
    const double log_l = std::log(lam);
    double haa = 0.0, hab = 0.0, hal = 0.0, hbb = 0.0, hbl = 0.0;
    for (double x : data.values()) {
        const double z = a * x - b / x;
        const double ez = std::exp(z);
        const double ew = std::exp(z + ez);           // e^z e^{e^z}
        const double lew = std::exp(log_l + z + ez);  // lambda e^z e^{e^z}
        const double denom = b + a * x * x;
        const double d2 = denom * denom;
        const double x2 = x * x;
        haa += -x2 * x2 / d2 + x2 * ez - x2 * lew * (1.0 + ez);
        hab += -x2 / d2 - ez + lew * (1.0 + ez);
        hal += -x * ew;
        hbb += -1.0 / d2 + ez / x2 - lew * (1.0 + ez) / x2;
        hbl += ew / x;
    }
    const double hll = -static_cast<double>(data.size()) / (lam * lam);

    Eigen::Matrix3d h;
    h << haa, hab, hal,
         hab, hbb, hbl,
         hal, hbl, hll;
    return h;
}

ObservedInfo observed_info(const Dataset& data, const EfweParams& p) {
    ObservedInfo out;
    out.info = -hessian(data, p);
    out.vcov = checked_inverse<3>(out.info, "observed_info");
    return out;
}

// ---------------------------------------------------------------------------
// Reference families

double ref_loglik(const Dataset& data, const RefModel& model) {
    double ll = 0.0;
    for (double x : data.values()) ll += ref_logpdf(model, x);
    return ll;
}

std::array<double, 2> ref_score(const Dataset& data, const RefModel& model) {
    const double p0 = model.params()[0];
    const double p1 = model.params()[1];
    double g0 = 0.0;
    double g1 = 0.0;
    for (double x : data.values()) {
        switch (model.family()) {
            case RefFamily::Fwe: {
                const double ez = std::exp(p0 * x - p1 / x);
                const double denom = p1 + p0 * x * x;
                g0 += x * x / denom + x - x * ez;
                g1 += 1.0 / denom - 1.0 / x + ez / x;
                break;
            }
            case RefFamily::Weibull: {
                const double lr = std::log(x / p0);
                const double u = std::exp(p1 * lr);
                g0 += p1 / p0 * (u - 1.0);
                g1 += 1.0 / p1 + lr - u * lr;
                break;
            }
            case RefFamily::Lfr: {
                const double h = p0 + p1 * x;
                g0 += 1.0 / h - x;
                g1 += x / h - 0.5 * x * x;
                break;
            }
        }
    }
    return {g0, g1};
}

Eigen::Matrix2d ref_information(const Dataset& data, const RefModel& model) {
    const double p0 = model.params()[0];
    const double p1 = model.params()[1];
    double h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (double x : data.values()) {
        switch (model.family()) {
            case RefFamily::Fwe: {
                const double ez = std::exp(p0 * x - p1 / x);
                const double denom = p1 + p0 * x * x;
                const double d2 = denom * denom;
                h00 += -x * x * x * x / d2 - x * x * ez;
                h01 += -x * x / d2 + ez;
                h11 += -1.0 / d2 - ez / (x * x);
                break;
            }
            case RefFamily::Weibull: {
                const double lr = std::log(x / p0);
                const double u = std::exp(p1 * lr);
                h00 += -p1 * (u - 1.0) / (p0 * p0) - p1 * p1 * u / (p0 * p0);
                h01 += (u - 1.0) / p0 + p1 / p0 * u * lr;
                h11 += -1.0 / (p1 * p1) - u * lr * lr;
                break;
            }
            case RefFamily::Lfr: {
                const double h = p0 + p1 * x;
                const double h2 = h * h;
                h00 += -1.0 / h2;
                h01 += -x / h2;
                h11 += -x * x / h2;
                break;
            }
        }
    }
    Eigen::Matrix2d info;
    info << -h00, -h01, -h01, -h11;
    return info;
}

// ---------------------------------------------------------------------------
// Fitting

InfoCriteria info_criteria(double loglik, int k, long n) {
    if (k < 0 || n < 1) {
        throw DomainError("info_criteria: need k >= 0 and n >= 1");
    }
    if (n <= k + 1) {
        throw DomainError("info_criteria: AICc undefined for n <= k + 1");
    }
    const double kk = k;
    const double aic = 2.0 * kk - 2.0 * loglik;
    return {aic, aic + 2.0 * kk * (kk + 1.0) / static_cast<double>(n - k - 1),
            kk * std::log(static_cast<double>(n)) - 2.0 * loglik};
}

double ks_statistic(std::span<const double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) {
        throw DomainError("ks_statistic: empty sample");
    }
    std::vector<double> xs(data.begin(), data.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j + 1 < xs.size() && xs[j + 1] == xs[i]) ++j;
        const double f = cdf(xs[i]);
        // Tied block occupies ranks i+1..j+1: the ecdf jumps from i/n to (j+1)/n.
        d = std::max({d, static_cast<double>(j + 1) / n - f, f - static_cast<double>(i) / n});
        i = j + 1;
    }
    return d;
}

std::vector<Interval> wald_ci(const FitResult& fit, double level) {
    if (!(level >= 0.0 && level < 1.0)) {
        throw DomainError("wald_ci: level must lie in [0, 1)");
    }
    const auto k = static_cast<Eigen::Index>(fit.params.size());
    if (fit.vcov.rows() != k || fit.vcov.cols() != k) {
        throw ConditioningError("wald_ci: fit carries no covariance matrix", {});
    }
    const double z = numerics::normal_quantile(0.5 + 0.5 * level);
    std::vector<Interval> out;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double var = fit.vcov(i, i);
        if (!(var >= 0.0)) {
            std::ostringstream msg;
            msg << "wald_ci: variance of " << (i < static_cast<Eigen::Index>(fit.names.size())
                                                    ? fit.names[i] : std::to_string(i))
                << " is " << var;
            throw ConditioningError(msg.str(), {});
        }
        const double half = z * std::sqrt(var);
        out.push_back({fit.params[i] - half, fit.params[i] + half});
    }
    return out;
}

namespace {

constexpr double kScoreTol = 1e-4;

void check_sample(const Dataset& data, Family family) {
    const auto k = static_cast<std::size_t>(parameter_count(family));
    if (data.size() < k + 2) {
        std::ostringstream msg;
        msg << "fit_mle: " << to_string(family) << " needs at least " << k + 2
            << " observations (got " << data.size() << ")";
        throw DomainError(msg.str());
    }
    if (data.values().front() == data.values().back()) {
        throw DegenerateDataError("fit_mle: all observations are equal");
    }
}

// Fills everything that only depends on the estimate.
void summarise(FitResult& fit, const Dataset& data, const std::function<Eigen::MatrixXd()>& vcov,
               std::span<const double> grad, double level) {
    const auto n = static_cast<long>(data.size());
    const int k = parameter_count(fit.family);
    const InfoCriteria ic = info_criteria(fit.loglik, k, n);
    fit.aic = ic.aic;
    fit.aicc = ic.aicc;
    fit.bic = ic.bic;
    fit.n = data.size();
    fit.names = parameter_names(fit.family);

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    fit.score_norm = gmax / static_cast<double>(n);

    fit.ks_stat = ks_statistic(data.values(), fit.cdf());
    fit.ks_pvalue = numerics::kolmogorov_pvalue(fit.ks_stat, n);

    fit.level = level;
    try {
        fit.vcov = vcov();
        fit.ci = wald_ci(fit, level);
    } catch (const ConditioningError& e) {
        fit.vcov = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
        fit.ci.assign(k, {std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN()});
        fit.converged = false;
        fit.note = e.what();
        return;
    }
    if (fit.converged && fit.score_norm >= kScoreTol) {
        fit.converged = false;
        std::ostringstream msg;
        msg << "score norm " << fit.score_norm << " exceeds " << kScoreTol;
        fit.note = msg.str();
    }
}

std::vector<double> default_init(const Dataset& data, Family family) {
    const double mean = data.mean();
    switch (family) {
        case Family::Efwe:
        case Family::Fwe: {
            const double a0 = 1.0 / mean;
            const double med = data.median();
            return {a0, std::clamp(med * a0 * med, 1e-3, 1e3)};
        }
        case Family::Weibull: return {mean, 1.0};
        case Family::Lfr: return {1.0 / mean, 1.0 / (mean * mean)};
    }
    return {};
}

RefFamily ref_family(Family family) {
    switch (family) {
        case Family::Fwe: return RefFamily::Fwe;
        case Family::Weibull: return RefFamily::Weibull;
        case Family::Lfr: return RefFamily::Lfr;
        case Family::Efwe: break;
    }
    throw DomainError("not a reference family");
}

FitResult fit_reference(const Dataset& data, Family family, const FitOptions& options) {
    const RefFamily rf = ref_family(family);
    std::vector<double> start = options.init.value_or(default_init(data, family));
    if (start.size() != 2 || !(start[0] > 0.0) || !(start[1] > 0.0)) {
        throw DomainError("fit_mle: reference-family init must be two positive values");
    }
    auto objective = [&](std::span<const double> v) {
        const double ll = ref_loglik(data, RefModel(rf, {std::exp(v[0]), std::exp(v[1])}));
        return std::isfinite(ll) ? -ll : kInf;
    };
    const auto nm = numerics::minimize(objective, {std::log(start[0]), std::log(start[1])},
                                       options.tol);

    FitResult fit;
    fit.family = family;
    fit.params = {std::exp(nm.x[0]), std::exp(nm.x[1])};
    fit.converged = nm.converged;
    fit.iterations = nm.iterations;
    if (!nm.converged) fit.note = "simplex iteration cap reached";
    const RefModel model(rf, fit.params);
    fit.loglik = ref_loglik(data, model);
    const auto grad = ref_score(data, model);
    summarise(
        fit, data,
        [&] { return Eigen::MatrixXd(checked_inverse<2>(ref_information(data, model), "fit_mle")); },
        grad, options.level);
    return fit;
}

FitResult fit_efwe(const Dataset& data, const FitOptions& options) {
    std::vector<double> start;
    if (options.init) {
        start = *options.init;
        if (start.size() < 2 || !(start[0] > 0.0) || !(start[1] > 0.0)) {
            throw DomainError("fit_mle: EFWE init needs positive (alpha, beta[, lambda])");
        }
    } else {
        FitOptions fwe_options;
        fwe_options.tol = 1e-8;
        const FitResult skeleton = fit_reference(data, Family::Fwe, fwe_options);
        start = skeleton.params;
    }

    const Likelihood kind = options.likelihood;
    auto objective = [&](std::span<const double> v) {
        const double ll = profiled_loglik(data, std::exp(v[0]), std::exp(v[1]), kind);
        return std::isfinite(ll) ? -ll : kInf;
    };
    const auto nm = numerics::minimize(objective, {std::log(start[0]), std::log(start[1])},
                                       options.tol);

    const double alpha = std::exp(nm.x[0]);
    const double beta = std::exp(nm.x[1]);
    const ProfileLambda pl = profile_lambda(data, alpha, beta, kind);

    FitResult fit;
    fit.family = Family::Efwe;
    fit.likelihood = kind;
    fit.params = {alpha, beta, pl.lambda};
    fit.converged = nm.converged && !pl.saturated;
    fit.iterations = nm.iterations;
    if (!nm.converged) fit.note = "simplex iteration cap reached";
    if (pl.saturated) fit.note = "profiled lambda saturated";
    const EfweParams p(alpha, beta, pl.lambda);
    fit.loglik = loglik(data, p, kind);
    fit.defect = defect(p);
    const auto grad = score(data, p, kind);
    summarise(
        fit, data, [&] { return Eigen::MatrixXd(observed_info(data, p).vcov); }, grad,
        options.level);
    return fit;
}

}  // namespace

FitResult fit_mle(const Dataset& data, Family family, const FitOptions& options) {
    check_sample(data, family);
    if (!(options.level >= 0.0 && options.level < 1.0)) {
        throw DomainError("fit_mle: level must lie in [0, 1)");
    }
    return family == Family::Efwe ? fit_efwe(data, options) : fit_reference(data, family, options);
}

// ---------------------------------------------------------------------------
// Kaplan-Meier

double KmCurve::at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return surv[static_cast<std::size_t>(it - times.begin()) - 1];
}

KmCurve kaplan_meier(std::span<const double> data) {
    if (data.empty()) {
        throw DomainError("kaplan_meier: empty sample");
    }
    std::vector<double> xs(data.begin(), data.end());
    for (double x : xs) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw DomainError("kaplan_meier: lifetimes must be finite and > 0");
        }
    }
    std::sort(xs.begin(), xs.end());
    KmCurve km;
    long at_risk = static_cast<long>(xs.size());
    double s = 1.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const long d = static_cast<long>(j - i);
        // Uncensored: the last factor is exactly zero.
        s = d == at_risk ? 0.0 : s * (1.0 - static_cast<double>(d) / static_cast<double>(at_risk));
        km.times.push_back(xs[i]);
        km.surv.push_back(s);
        km.at_risk.push_back(at_risk);
        km.events.push_back(d);
        at_risk -= d;
        i = j;
    }
    return km;
}

}  // namespace efwe
