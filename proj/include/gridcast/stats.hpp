#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridcast/rng.hpp"

namespace gridcast {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::domain_error("mean of empty sample");
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Linearly interpolated quantile (the same convention as numpy's default).
/// Input must already be sorted ascending.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::domain_error("quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, q);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

struct Interval {
    double lo = 0;
    double hi = 0;
    double width() const noexcept { return hi - lo; }
};

/// Percentile bootstrap CI for the median. Deterministic given rng.
inline Interval bootstrap_median_ci(std::span<const double> xs, std::int32_t resamples,
                                    Rng& rng, double level = 0.95) {
    if (xs.empty()) throw std::domain_error("bootstrap on empty sample");
    if (resamples < 1) throw std::domain_error("bootstrap needs >= 1 resample");
    const auto m = xs.size();
    std::vector<double> sample(m);
    std::vector<double> medians(static_cast<std::size_t>(resamples));
    for (auto& med : medians) {
        for (auto& s : sample) s = xs[rng.bounded(m)];
        std::sort(sample.begin(), sample.end());
        med = quantile_sorted(sample, 0.5);
    }
    std::sort(medians.begin(), medians.end());
    const double tail = (1.0 - level) / 2.0;
    return {quantile_sorted(medians, tail), quantile_sorted(medians, 1.0 - tail)};
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

/// Ordinary least squares of y against x. A constant y is reported as a
/// perfect fit of the constant (r_squared = 1).
inline LinearFit ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::domain_error("ols needs >= 2 paired points");
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n; my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::domain_error("ols: predictor is constant");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        const double ss_res = syy - fit.slope * sxy;
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

/// Pearson chi-square statistic against uniform expected counts.
inline double chi_square_uniform(std::span<const std::int64_t> counts) {
    if (counts.size() < 2) throw std::domain_error("chi-square needs >= 2 cells");
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw std::domain_error("chi-square with no observations");
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

namespace detail {

/// Inverse standard normal CDF, Acklam's rational approximation
/// (relative error < 1.15e-9 over (0,1)).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile needs p in (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double q, r;
    if (p < p_low) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p <= 1 - p_low) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

} // namespace detail

/// Chi-square quantile via the Wilson-Hilferty cube approximation; accurate
/// to a few tenths of a percent for the dof used in the uniformity checks.
inline double chi_square_quantile(double p, std::int64_t dof) {
    if (dof < 1) throw std::domain_error("chi_square_quantile needs dof >= 1");
    const double z = detail::normal_quantile(p);
    const double nu = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * nu) + z * std::sqrt(2.0 / (9.0 * nu));
    return nu * t * t * t;
}

} // namespace gridcast
