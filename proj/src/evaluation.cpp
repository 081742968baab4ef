#include "rti/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "rti/errors.hpp"
#include "rti/keyval.hpp"

namespace rti {

ErrorStats error_stats(std::span<const double> errors) {
    if (errors.empty()) throw std::invalid_argument("error_stats: empty input");
    const double n = static_cast<double>(errors.size());
    const bool constant =
        std::all_of(errors.begin(), errors.end(), [&](double e) { return e == errors.front(); });
    if (constant) {
        ErrorStats stats;
        stats.mean = errors.front();
        stats.variance = 0.0;
        stats.count = errors.size();
        return stats; // skewness undefined at zero variance
    }
    double sum = 0.0;
    for (double e : errors) sum += e;
    const double mean = sum / n;
    double m2 = 0.0, m3 = 0.0;
    for (double e : errors) {
        const double d = e - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;

    ErrorStats stats;
    stats.mean = mean;
    stats.count = errors.size();
    stats.variance = errors.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
    if (m2 > 0.0) stats.skewness = m3 / (m2 * std::sqrt(m2));
    return stats;
}

std::string to_string(DistFamily family) {
    switch (family) {
        case DistFamily::rayleigh: return "rayleigh";
        case DistFamily::gamma: return "gamma";
        case DistFamily::lognormal: return "lognormal";
    }
    return "unknown";
}

namespace {

void check_positive(std::span<const double> data, const char* who) {
    if (data.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
    for (double x : data)
        if (!(x > 0.0)) throw std::invalid_argument(std::string(who) + ": non-positive datum");
}

double fit_gamma_shape(double log_mean_gap) {
    // Solve ln(k) - digamma(k) = s by Newton iteration.
    const double s = log_mean_gap;
    if (!(s > 0.0)) throw NumericalError("gamma fit: degenerate sample (zero spread)");
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int iter = 0; iter < 100; ++iter) {
        const double f = std::log(k) - boost::math::digamma(k) - s;
        const double df = 1.0 / k - boost::math::trigamma(k);
        double next = k - f / df;
        if (!(next > 0.0)) next = k / 2.0;
        if (std::abs(next - k) <= 1e-10 * std::max(1.0, k)) return next;
        k = next;
    }
    throw NumericalError("gamma fit: shape iteration did not converge");
}

} // namespace

DistFit fit_distribution(std::span<const double> data, DistFamily family) {
    check_positive(data, "fit_distribution");
    const double n = static_cast<double>(data.size());
    DistFit fit;
    fit.family = family;
    switch (family) {
        case DistFamily::rayleigh: {
            double sum_sq = 0.0;
            for (double x : data) sum_sq += x * x;
            fit.param1 = std::sqrt(sum_sq / (2.0 * n));
            break;
        }
        case DistFamily::lognormal: {
            double sum = 0.0;
            for (double x : data) sum += std::log(x);
            const double mu = sum / n;
            double var = 0.0;
            for (double x : data) {
                const double d = std::log(x) - mu;
                var += d * d;
            }
            fit.param1 = mu;
            fit.param2 = std::sqrt(var / n);
            break;
        }
        case DistFamily::gamma: {
            double sum = 0.0, log_sum = 0.0;
            for (double x : data) {
                sum += x;
                log_sum += std::log(x);
            }
            const double mean = sum / n;
            const double shape = fit_gamma_shape(std::log(mean) - log_sum / n);
            fit.param1 = shape;
            fit.param2 = mean / shape;
            break;
        }
    }
    return fit;
}

double dist_cdf(const DistFit& fit, double x) {
    if (x <= 0.0) return 0.0;
    switch (fit.family) {
        case DistFamily::rayleigh:
            return -std::expm1(-x * x / (2.0 * fit.param1 * fit.param1));
        case DistFamily::gamma:
            return boost::math::gamma_p(fit.param1, x / fit.param2);
        case DistFamily::lognormal:
            return 0.5 * std::erfc(-(std::log(x) - fit.param1) / (fit.param2 * std::numbers::sqrt2));
    }
    return 0.0;
}

double dist_pdf(const DistFit& fit, double x) {
    if (x <= 0.0) return 0.0;
    switch (fit.family) {
        case DistFamily::rayleigh: {
            const double s2 = fit.param1 * fit.param1;
            return x / s2 * std::exp(-x * x / (2.0 * s2));
        }
        case DistFamily::gamma: {
            const double k = fit.param1, theta = fit.param2;
            return std::exp((k - 1.0) * std::log(x) - x / theta - std::lgamma(k) - k * std::log(theta));
        }
        case DistFamily::lognormal: {
            const double z = (std::log(x) - fit.param1) / fit.param2;
            return std::exp(-0.5 * z * z) / (x * fit.param2 * std::sqrt(2.0 * std::numbers::pi));
        }
    }
    return 0.0;
}

double ks_statistic(std::span<const double> sorted_data, const DistFit& fit) {
    const double n = static_cast<double>(sorted_data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_data.size(); ++i) {
        const double f = dist_cdf(fit, sorted_data[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

double kolmogorov_survival(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 1.0) {
        // Complementary theta series, fast for small t.
        double sum = 0.0;
        for (int j = 1; j <= 100; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(-odd * odd * std::numbers::pi * std::numbers::pi / (8.0 * t * t));
            sum += term;
            if (term < 1e-16 * sum) break;
        }
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / t * sum;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> data, const DistFit& fit, double significance) {
    check_positive(data, "ks_test");
    if (!(significance > 0.0 && significance < 1.0))
        throw std::domain_error("ks_test: significance must be in (0, 1)");
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    KsResult result;
    result.statistic = ks_statistic(sorted, fit);
    result.p_value = kolmogorov_survival(std::sqrt(static_cast<double>(data.size())) * result.statistic);
    result.h = result.p_value < significance ? 1 : 0;
    return result;
}

namespace {

double draw_from(const DistFit& fit, std::mt19937_64& rng) {
    switch (fit.family) {
        case DistFamily::rayleigh: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            double v;
            do { v = u(rng); } while (v <= 0.0);
            return fit.param1 * std::sqrt(-2.0 * std::log(v));
        }
        case DistFamily::gamma: {
            std::gamma_distribution<double> g(fit.param1, fit.param2);
            return g(rng);
        }
        case DistFamily::lognormal: {
            std::normal_distribution<double> norm(fit.param1, fit.param2);
            return std::exp(norm(rng));
        }
    }
    return 0.0;
}

} // namespace

KsResult ks_test_bootstrap(std::span<const double> data, DistFamily family, double significance,
                           int replicates, std::uint64_t seed) {
    check_positive(data, "ks_test_bootstrap");
    if (replicates < 1) throw std::invalid_argument("ks_test_bootstrap: replicates must be >= 1");
    const DistFit fit = fit_distribution(data, family);
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double observed = ks_statistic(sorted, fit);

    std::mt19937_64 rng(seed);
    std::vector<double> replica(data.size());
    int at_least = 0;
    for (int b = 0; b < replicates; ++b) {
        for (double& x : replica) {
            do { x = draw_from(fit, rng); } while (!(x > 0.0));
        }
        const DistFit refit = fit_distribution(replica, family);
        std::sort(replica.begin(), replica.end());
        if (ks_statistic(replica, refit) >= observed) ++at_least;
    }
    KsResult result;
    result.statistic = observed;
    result.p_value = (1.0 + at_least) / (1.0 + replicates);
    result.h = result.p_value < significance ? 1 : 0;
    return result;
}

std::vector<HistogramRow> histogram(std::span<const double> data, const DistFit& fit) {
    check_positive(data, "histogram");
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    const std::size_t n = sorted.size();

    auto quantile = [&](double q) {
        const double pos = q * (static_cast<double>(n) - 1.0);
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= n) return sorted.back();
        const double frac = pos - static_cast<double>(i);
        return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    if (!(width > 0.0)) width = (hi > lo) ? (hi - lo) : 1.0;
    std::size_t bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::clamp<std::size_t>(bins, 1, 10000);
    width = (hi > lo) ? (hi - lo) / static_cast<double>(bins) : width;

    std::vector<HistogramRow> rows(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        rows[b].left = lo + width * static_cast<double>(b);
        rows[b].right = lo + width * static_cast<double>(b + 1);
        rows[b].fitted_density = dist_pdf(fit, 0.5 * (rows[b].left + rows[b].right));
    }
    for (double x : sorted) {
        std::size_t b = (hi > lo) ? static_cast<std::size_t>((x - lo) / width) : 0;
        if (b >= bins) b = bins - 1;
        ++rows[b].count;
    }
    return rows;
}

namespace {

std::string fixed(double v, int digits = 6) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string fit_params(const DistFit& fit) {
    switch (fit.family) {
        case DistFamily::rayleigh: return "sigma=" + fixed(fit.param1);
        case DistFamily::gamma: return "shape=" + fixed(fit.param1) + ",scale=" + fixed(fit.param2);
        case DistFamily::lognormal: return "mu=" + fixed(fit.param1) + ",sigma=" + fixed(fit.param2);
    }
    return {};
}

} // namespace

std::string render_report(const ReportInputs& in) {
    std::string out;
    auto line = [&out](const std::string& s) { out += s; out += '\n'; };

    line("parameters");
    line("----------");
    for (const auto& [k, v] : in.parameters) line(k + " = " + v);
    line("");

    line("distance error statistics");
    line("-------------------------");
    line("estimate_rows     " + std::to_string(in.estimate_rows));
    line("no_occupancy_rows " + std::to_string(in.no_occupancy_rows));
    if (in.stats) {
        line("count             " + std::to_string(in.stats->count));
        line("mean_m            " + fixed(in.stats->mean));
        line("variance_m2       " + fixed(in.stats->variance));
        line("skewness          " + (in.stats->skewness ? fixed(*in.stats->skewness) : "undefined"));
    } else {
        line("count             0");
    }
    line("");

    if (!in.fits.empty()) {
        line("kolmogorov-smirnov goodness-of-fit (significance " + fixed(in.significance) + ")");
        line("family      params                          statistic   p_value     h");
        for (const auto& [fit, ks] : in.fits) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%-11s %-31s %-11s %-11s %d", to_string(fit.family).c_str(),
                          fit_params(fit).c_str(), fixed(ks.statistic).c_str(),
                          fixed(ks.p_value).c_str(), ks.h);
            line(buf);
        }
        line("");
    }

    if (!in.comparisons.empty()) {
        line("mean error comparison");
        line("---------------------");
        if (in.stats) line("this run: " + fixed(in.stats->mean) + " m");
        for (const auto& [label, mean] : in.comparisons)
            line(label + ": " + fixed(mean) + " m");
        line("");
    }

    line("instruction counters");
    line("--------------------");
    line("additions       " + std::to_string(in.counters.additions));
    line("multiplications " + std::to_string(in.counters.multiplications));
    return out;
}

void write_report_csv(const ReportInputs& in, std::ostream& out) {
    out << "section,key,value\n";
    for (const auto& [k, v] : in.parameters) out << "parameters," << k << ',' << v << '\n';
    out << "stats,estimate_rows," << in.estimate_rows << '\n';
    out << "stats,no_occupancy_rows," << in.no_occupancy_rows << '\n';
    if (in.stats) {
        out << "stats,count," << in.stats->count << '\n';
        out << "stats,mean_m," << format_double(in.stats->mean) << '\n';
        out << "stats,variance_m2," << format_double(in.stats->variance) << '\n';
        out << "stats,skewness,"
            << (in.stats->skewness ? format_double(*in.stats->skewness) : "undefined") << '\n';
    } else {
        out << "stats,count,0\n";
    }
    for (const auto& [fit, ks] : in.fits) {
        const std::string f = to_string(fit.family);
        out << "fit," << f << "_param1," << format_double(fit.param1) << '\n';
        out << "fit," << f << "_param2," << format_double(fit.param2) << '\n';
        out << "fit," << f << "_ks_statistic," << format_double(ks.statistic) << '\n';
        out << "fit," << f << "_p_value," << format_double(ks.p_value) << '\n';
        out << "fit," << f << "_h," << ks.h << '\n';
    }
    for (const auto& [label, mean] : in.comparisons)
        out << "comparison," << label << ',' << format_double(mean) << '\n';
    out << "counters,additions," << in.counters.additions << '\n';
    out << "counters,multiplications," << in.counters.multiplications << '\n';
}

void write_histogram_csv(std::span<const HistogramRow> rows, std::ostream& out) {
    out << "bin_left,bin_right,count,fitted_density_at_center\n";
    for (const HistogramRow& r : rows)
        out << format_double(r.left) << ',' << format_double(r.right) << ',' << r.count << ','
            << format_double(r.fitted_density) << '\n';
}

} // namespace rti
