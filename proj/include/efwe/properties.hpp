#pragma once

#include <vector>

#include "efwe/distributions.hpp"
#include "efwe/numerics.hpp"

namespace efwe {

enum class StationaryKind { LocalMax, LocalMin };

struct StationaryPoint {
    double x;
    double log_pdf;
    StationaryKind kind;
};

struct ModeResult {
    /// Location of the highest local maximum of the density.
    double mode;
    /// More than one local maximum was found.
    bool multimodal;
    /// Every interior stationary point found, ascending in x.
    std::vector<StationaryPoint> stationary_points;
};

/// Interior stationary points of the density, located by a sign scan of
/// d/dx ln f on a 400-point geometric grid over [1e-6, 1e6] and refined with
/// find_root. Throws NoInteriorModeError if the scan finds no sign change.
ModeResult mode(const EfweParams& p);

/// Scaled derivative of ln f whose sign matches f'(x):
/// 1 + e^z - lambda e^{z + e^z} - 2 beta x / (alpha x^2 + beta)^2.
double mode_equation(const EfweParams& p, double x);

/// quantile(p, 0.5); needs lambda < ln 2.
double median(const EfweParams& p);

/// (q.75 - 2 q.5 + q.25) / (q.75 - q.25). Needs every quartile above the defect.
double bowley_skewness(const EfweParams& p);
/// (q.875 - q.625 - q.375 + q.125) / (q.75 - q.25), as printed for this family.
/// Moors' own measure adds q.375 - q.125 instead, so this one can be negative.
double moors_kurtosis(const EfweParams& p);

/// Integral of x^r f(x) over (0, inf). Because the density is defective,
/// raw_moment(p, 0) == exp(-lambda).
double raw_moment(const EfweParams& p, int r, const numerics::QuadSpec& spec = {});

/// Integral of e^{tx} f(x) over (0, inf); finite for every real t.
double mgf(const EfweParams& p, double t, const numerics::QuadSpec& spec = {});

struct SeriesTruncation {
    int max_i = 30;
    int max_j = 30;
    int max_k = 30;
    double term_floor = 1e-14;
};

struct SeriesResult {
    double value;
    /// Partial sums after each completed outer index i.
    std::vector<double> partial_sums;
    /// |S_last| / |S_{last-1}|; values near or above 1 mean the outer sum is
    /// not settling.
    double growth_ratio;
    /// True when |partial sums| never decreased from one outer index to the next.
    bool nondecreasing;
    /// True when every index loop stopped on term_floor rather than its cap.
    bool converged;
    long terms_skipped;
};

/// Term-by-term transcription of the published triple series for the r-th
/// moment. Gamma factors at non-positive integers are dropped piecewise. This
/// is not a valid moment formula; `raw_moment` is the authoritative value.
SeriesResult raw_moment_series(const EfweParams& p, int r, const SeriesTruncation& trunc = {});

struct OrderStatSpec {
    int r;
    int n;
};

/// Density of the r-th order statistic of n draws,
/// f(x) F^{r-1} (1 - F)^{n-r} / B(r, n - r + 1), evaluated in log space.
double order_stat_pdf(const EfweParams& p, OrderStatSpec spec, double x);

/// The same density in its binomially expanded form
/// sum_i (-1)^i n! / (i! (r-1)! (n-r-i)!) F^{i+r-1} f.
double order_stat_pdf_expanded(const EfweParams& p, OrderStatSpec spec, double x);

}  // namespace efwe
