#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "regionlab/error.hpp"
#include "regionlab/parallel.hpp"
#include "regionlab/rng.hpp"
#include "regionlab/stats.hpp"
#include "regionlab/weights.hpp"

namespace regionlab {

namespace detail {

/// Mean-centers x and returns the sum of squared deviations, which must be
/// positive for any autocorrelation statistic to be defined.
inline std::pair<std::vector<double>, double> center(const std::vector<double>& x) {
    const double m = mean(x);
    std::vector<double> z(x.size());
    double ssd = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = x[i] - m;
        ssd += z[i] * z[i];
    }
    require(ssd > 0.0, "attribute is constant; spatial autocorrelation is undefined");
    return {std::move(z), ssd};
}

inline double moran_stat(const SpatialWeights& w, const std::vector<double>& z, double ssd) {
    const std::vector<double> lz = w.lag(z);
    double num = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        num += z[i] * lz[i];
    return num / ssd;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Global Moran's I
// ---------------------------------------------------------------------------

struct MoranResult {
    double observed = 0.0;
    double expectation = 0.0; // -1/(n-1) under the randomization null
    double p_value = 1.0;     // two-sided permutation pseudo p-value
    double perm_mean = 0.0;
    double perm_sd = 0.0;
    int n_perm = 0;
    std::uint64_t seed = 0;
    std::vector<double> perm_values;
};

/// Global Moran's I with a permutation test. Values are permuted across
/// locations; the p-value counts permuted statistics at least as far from
/// the null expectation as the observed one:
///   p = (1 + #{|I_perm - E| >= |I_obs - E|}) / (n_perm + 1).
/// Each permutation draws from its own seed-derived stream, so the result
/// is independent of the thread count.
inline MoranResult global_moran(const SpatialWeights& w, const std::vector<double>& x,
                                int n_perm = 999, std::uint64_t seed = 0) {
    require(x.size() == w.size(), "attribute has ", x.size(), " values for ", w.size(), " units");
    require(n_perm >= 1, "need at least one permutation, got ", n_perm);
    const std::size_t n = x.size();
    auto [z, ssd] = detail::center(x);

    MoranResult result;
    result.observed = detail::moran_stat(w, z, ssd);
    result.expectation = -1.0 / static_cast<double>(n - 1);
    result.n_perm = n_perm;
    result.seed = seed;
    result.perm_values.assign(static_cast<std::size_t>(n_perm), 0.0);

    const std::vector<double>& centered = z;
    const double denom = ssd;
    parallel_for(static_cast<std::size_t>(n_perm), [&](std::size_t t) {
        Rng rng(seed, t);
        std::vector<double> zp = centered;
        rng.shuffle(zp);
        result.perm_values[t] = detail::moran_stat(w, zp, denom);
    });

    const double gap = std::abs(result.observed - result.expectation);
    std::size_t extreme = 0;
    double sum = 0.0;
    for (double v : result.perm_values) {
        if (std::abs(v - result.expectation) >= gap)
            ++extreme;
        sum += v;
    }
    result.perm_mean = sum / static_cast<double>(n_perm);
    result.p_value = static_cast<double>(1 + extreme) / static_cast<double>(n_perm + 1);
    if (n_perm > 1) {
        double ss = 0.0;
        for (double v : result.perm_values)
            ss += (v - result.perm_mean) * (v - result.perm_mean);
        result.perm_sd = std::sqrt(ss / static_cast<double>(n_perm - 1));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Moran scatter plot data
// ---------------------------------------------------------------------------

struct MoranPlot {
    std::vector<double> z;   // mean-centered attribute
    std::vector<double> lag; // neighborhood average of z
    double slope = 0.0;      // equals Moran's I for row-standardized weights
    double intercept = 0.0;
};

inline MoranPlot moran_plot(const SpatialWeights& w, const std::vector<double>& x) {
    require(x.size() == w.size(), "attribute has ", x.size(), " values for ", w.size(), " units");
    auto [z, ssd] = detail::center(x);
    (void)ssd;
    MoranPlot plot;
    plot.lag = w.lag(z);
    plot.z = std::move(z);
    const LineFit fit = least_squares(plot.z, plot.lag);
    plot.slope = fit.slope;
    plot.intercept = fit.intercept;
    return plot;
}

// ---------------------------------------------------------------------------
// Local Moran's I
// ---------------------------------------------------------------------------

enum class Quadrant { HighHigh, HighLow, LowHigh, LowLow };

inline const char* quadrant_label(Quadrant q) {
    switch (q) {
    case Quadrant::HighHigh: return "HH";
    case Quadrant::HighLow: return "HL";
    case Quadrant::LowHigh: return "LH";
    case Quadrant::LowLow: return "LL";
    }
    return "LL";
}

struct LocalMoranUnit {
    double value = 0.0;       // I_i
    double expectation = 0.0; // conditional null mean of I_i
    double p_value = 1.0;
    Quadrant quadrant = Quadrant::LowLow;
    bool significant = false;
};

struct LocalMoranResult {
    std::vector<LocalMoranUnit> units;
    double alpha = 0.05;
    int n_perm = 0;
    std::uint64_t seed = 0;

    /// Quadrant code for significant units, "NS" otherwise.
    std::string cluster_label(std::size_t i) const {
        return units[i].significant ? quadrant_label(units[i].quadrant) : "NS";
    }
};

/// Local Moran's I_i = z_i * lag(z)_i / m2 with m2 = sum(z^2)/n. The unit
/// means equal the global statistic. Inference is by conditional
/// permutation: z_i stays at its location while its neighbors' values are
/// drawn from the remaining n-1 without replacement. Under that scheme
/// E[I_i] = -z_i^2 / ((n-1) m2), and the two-sided pseudo p-value folds
/// around this expectation. One seed-derived stream per unit keeps results
/// independent of the thread count.
inline LocalMoranResult local_moran(const SpatialWeights& w, const std::vector<double>& x,
                                    int n_perm = 999, double alpha = 0.05,
                                    std::uint64_t seed = 0) {
    require(x.size() == w.size(), "attribute has ", x.size(), " values for ", w.size(), " units");
    require(n_perm >= 1, "need at least one permutation, got ", n_perm);
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1), got ", alpha);
    const std::size_t n = x.size();
    auto [z, ssd] = detail::center(x);
    const double m2 = ssd / static_cast<double>(n);
    const std::vector<double> lz = w.lag(z);

    LocalMoranResult result;
    result.alpha = alpha;
    result.n_perm = n_perm;
    result.seed = seed;
    result.units.resize(n);

    parallel_for(n, [&](std::size_t i) {
        LocalMoranUnit& unit = result.units[i];
        unit.value = z[i] * lz[i] / m2;
        unit.expectation = -(z[i] * z[i]) / (static_cast<double>(n - 1) * m2);
        unit.quadrant = z[i] > 0.0 ? (lz[i] > 0.0 ? Quadrant::HighHigh : Quadrant::HighLow)
                                   : (lz[i] > 0.0 ? Quadrant::LowHigh : Quadrant::LowLow);

        const std::vector<double>& weights = w.weights(i);
        const std::size_t degree = weights.size();
        std::vector<std::size_t> pool;
        pool.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                pool.push_back(j);
        require(pool.size() >= degree, "unit ", i, " has more neighbors than other units");

        Rng rng(seed, i);
        const double gap = std::abs(unit.value - unit.expectation);
        std::size_t extreme = 0;
        for (int t = 0; t < n_perm; ++t) {
            // Partial Fisher-Yates: the first `degree` entries of the pool
            // become a uniform sample without replacement.
            for (std::size_t m = 0; m < degree; ++m) {
                const std::size_t j = m + rng.uniform_index(pool.size() - m);
                std::swap(pool[m], pool[j]);
            }
            double lag_perm = 0.0;
            for (std::size_t m = 0; m < degree; ++m)
                lag_perm += weights[m] * z[pool[m]];
            const double value_perm = z[i] * lag_perm / m2;
            if (std::abs(value_perm - unit.expectation) >= gap)
                ++extreme;
        }
        unit.p_value = static_cast<double>(1 + extreme) / static_cast<double>(n_perm + 1);
        unit.significant = unit.p_value <= alpha;
    });
    return result;
}

} // namespace regionlab
