#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "regionlab/error.hpp"

namespace regionlab {

inline double mean(std::span<const double> values) {
    require(!values.empty(), "mean of empty range");
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / static_cast<double>(values.size());
}

/// Sample variance, divisor n-1.
inline double sample_variance(std::span<const double> values) {
    require(values.size() >= 2, "sample_variance needs at least 2 values");
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values)
        ss += (v - m) * (v - m);
    return ss / static_cast<double>(values.size() - 1);
}

inline double sample_sd(std::span<const double> values) {
    return std::sqrt(sample_variance(values));
}

/// Linear-interpolation quantile on sorted input (R type 7):
/// h = (n-1)p, q = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    require(!sorted.empty(), "quantile of empty range");
    require(p >= 0.0 && p <= 1.0, "quantile level out of [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size())
        return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

/// log(sum(exp(x))) guarded against overflow.
inline double log_sum_exp(std::span<const double> values) {
    require(!values.empty(), "log_sum_exp of empty range");
    const double max = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(max))
        return max;
    double sum = 0.0;
    for (double v : values)
        sum += std::exp(v - max);
    return max + std::log(sum);
}

/// Slope and intercept of the least-squares line y = a + b x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "least_squares: bad input sizes");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "least_squares: zero variance in x");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

} // namespace regionlab
