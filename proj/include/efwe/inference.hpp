#pragma once

// Maximum-likelihood fitting for complete samples: EFWE with its analytic
// score and observed information, the FWE / Weibull / LFR reference families,
// Wald intervals, information criteria, the one-sample K-S statistic and the
// Kaplan-Meier estimator.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "efwe/datasets.hpp"
#include "efwe/distributions.hpp"

namespace efwe {

enum class Family { Efwe, Fwe, Weibull, Lfr };

std::string_view to_string(Family family);
/// Accepts "efwe", "fwe", "weibull", "lfr"; throws DomainError otherwise.
Family parse_family(std::string_view name);
int parameter_count(Family family);
std::vector<std::string> parameter_names(Family family);

/// Which EFWE likelihood to maximise.
enum class Likelihood {
    /// sum ln f(x_i) with the printed density; this is what reproduces the
    /// published Aarset fit.
    Verbatim,
    /// sum ln[f(x_i) / exp(-lambda)]: the proper law on (0, inf). Matches data
    /// drawn with SamplePolicy::Conditional.
    Conditional,
};

struct Interval {
    double lo;
    double hi;
};

struct InfoCriteria {
    double aic;
    double aicc;
    double bic;
};

struct FitResult {
    Family family = Family::Efwe;
    Likelihood likelihood = Likelihood::Verbatim;
    std::vector<double> params;
    std::vector<std::string> names;
    std::size_t n = 0;
    double loglik = 0.0;
    double aic = 0.0;
    double aicc = 0.0;
    double bic = 0.0;
    double ks_stat = 0.0;
    double ks_pvalue = 0.0;
    Eigen::MatrixXd vcov;
    double level = 0.95;
    std::vector<Interval> ci;
    /// F(0+) of the fitted law; nonzero only for EFWE.
    double defect = 0.0;
    bool converged = false;
    /// max |score component| / n at the estimate.
    double score_norm = 0.0;
    int iterations = 0;
    /// Why the fit is flagged, when it is.
    std::string note;

    /// Throws DomainError unless family == Efwe.
    EfweParams efwe() const;
    /// Throws DomainError if family == Efwe.
    RefModel ref_model() const;
    /// Fitted cdf, whichever the family.
    std::function<double(double)> cdf() const;
    /// Fitted survival function, whichever the family.
    std::function<double(double)> survival() const;
};

struct FitOptions {
    /// Starting point in natural parameters. For EFWE only (alpha, beta) are
    /// used; lambda is profiled.
    std::optional<std::vector<double>> init;
    double level = 0.95;
    Likelihood likelihood = Likelihood::Verbatim;
    /// Simplex tolerance on the log-parameter scale.
    double tol = 1e-11;
};

// --- EFWE likelihood ------------------------------------------------------

double loglik(const Dataset& data, const EfweParams& p, Likelihood kind = Likelihood::Verbatim);

/// (dL/dalpha, dL/dbeta, dL/dlambda).
std::array<double, 3> score(const Dataset& data, const EfweParams& p,
                            Likelihood kind = Likelihood::Verbatim);

struct ProfileLambda {
    double lambda;
    double log_lambda;
    /// lambda hat under- or overflowed a double and was clamped.
    bool saturated;
};

/// Root of dL/dlambda = 0 at fixed (alpha, beta): n / sum e^{e^{z_i}}
/// (verbatim) or n / sum (e^{e^{z_i}} - 1) (conditional).
ProfileLambda profile_lambda(const Dataset& data, double alpha, double beta,
                             Likelihood kind = Likelihood::Verbatim);

/// max over lambda of loglik at fixed (alpha, beta).
double profiled_loglik(const Dataset& data, double alpha, double beta,
                       Likelihood kind = Likelihood::Verbatim);

/// Second derivatives of loglik, closed form. Same for both likelihood kinds.
Eigen::Matrix3d hessian(const Dataset& data, const EfweParams& p);

struct ObservedInfo {
    Eigen::Matrix3d info;
    Eigen::Matrix3d vcov;
};

/// -hessian() and its inverse. Throws ConditioningError (with eigenvalues)
/// unless the information is positive definite.
ObservedInfo observed_info(const Dataset& data, const EfweParams& p);

// --- Reference families ---------------------------------------------------

double ref_loglik(const Dataset& data, const RefModel& model);
std::array<double, 2> ref_score(const Dataset& data, const RefModel& model);
/// Negative Hessian of ref_loglik.
Eigen::Matrix2d ref_information(const Dataset& data, const RefModel& model);

// --- Fitting and summaries ------------------------------------------------

/// Maximum-likelihood fit. EFWE maximises the lambda-profiled likelihood over
/// (ln alpha, ln beta), seeded from an FWE fit unless `init` is given; the
/// reference families are fitted over their log-parameters. Non-convergence is
/// reported through `converged`, not thrown. Throws DegenerateDataError when
/// all observations are equal and DomainError when n < k + 2.
FitResult fit_mle(const Dataset& data, Family family, const FitOptions& options = {});

/// estimate +- z_{(1+level)/2} sqrt(var). Accepts level in [0, 1).
std::vector<Interval> wald_ci(const FitResult& fit, double level);

/// sup |F_n - F| over the sample, with tied observations forming one step.
double ks_statistic(std::span<const double> data, const std::function<double(double)>& cdf);

InfoCriteria info_criteria(double loglik, int k, long n);

struct KmCurve {
    std::vector<double> times;
    std::vector<double> surv;
    std::vector<long> at_risk;
    std::vector<long> events;

    /// Right-continuous step value S(t).
    double at(double t) const;
};

/// Product-limit estimate for uncensored data.
KmCurve kaplan_meier(std::span<const double> data);

}  // namespace efwe
