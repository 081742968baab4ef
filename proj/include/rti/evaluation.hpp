#pragma once
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rti/reconstruction.hpp"

namespace rti {

/// Sample moments of a distance-error set. variance uses the n-1 denominator;
/// skewness is the biased g1 = m3 / m2^(3/2) over central moments with
/// denominator n, and is absent when the sample variance is zero.
struct ErrorStats {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;
    std::size_t count = 0;
};

ErrorStats error_stats(std::span<const double> errors);

enum class DistFamily { rayleigh, gamma, lognormal };
std::string to_string(DistFamily family);

/// Fitted parameters. rayleigh: param1 = sigma (param2 unused);
/// gamma: param1 = shape, param2 = scale; lognormal: param1 = mu of log data,
/// param2 = sigma of log data.
struct DistFit {
    DistFamily family = DistFamily::rayleigh;
    double param1 = 0.0;
    double param2 = 0.0;
};

/// Maximum-likelihood fit. Gamma solves the shape equation by Newton iteration
/// to 1e-10 within 100 steps and throws NumericalError on non-convergence.
/// Any non-positive datum is rejected.
DistFit fit_distribution(std::span<const double> data, DistFamily family);

double dist_cdf(const DistFit& fit, double x);
double dist_pdf(const DistFit& fit, double x);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    int h = 0; // 1 = reject at the given significance
};

/// One-sample Kolmogorov-Smirnov test against the fitted CDF, p-value from the
/// asymptotic Kolmogorov distribution evaluated at sqrt(n) * D.
KsResult ks_test(std::span<const double> data, const DistFit& fit, double significance);

/// sup_x |F_n(x) - F(x)| over the sorted sample (D+ / D- form).
double ks_statistic(std::span<const double> sorted_data, const DistFit& fit);

/// Survival function of the asymptotic Kolmogorov distribution at t.
double kolmogorov_survival(double t);

/// Parametric-bootstrap (Lilliefors-style) variant that accounts for the
/// parameters having been fitted from the same sample.
KsResult ks_test_bootstrap(std::span<const double> data, DistFamily family, double significance,
                           int replicates, std::uint64_t seed);

struct HistogramRow {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
    double fitted_density = 0.0; // fitted pdf at the bin center
};

/// Freedman-Diaconis binning with the fitted density sampled at bin centers.
std::vector<HistogramRow> histogram(std::span<const double> data, const DistFit& fit);

/// Everything the report renders. parameters are echoed verbatim.
struct ReportInputs {
    std::vector<std::pair<std::string, std::string>> parameters;
    std::optional<ErrorStats> stats;
    std::vector<std::pair<DistFit, KsResult>> fits;
    double significance = 0.05;
    std::vector<std::pair<std::string, double>> comparisons; // (method, mean error m)
    OpCounters counters;
    std::size_t estimate_rows = 0;
    std::size_t no_occupancy_rows = 0;
};

std::string render_report(const ReportInputs& inputs);
void write_report_csv(const ReportInputs& inputs, std::ostream& out);
void write_histogram_csv(std::span<const HistogramRow> rows, std::ostream& out);

} // namespace rti
