#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "regionlab/error.hpp"

namespace regionlab {

/// A partition of observations into k ordered classes.
struct Classification {
    int k = 1;
    std::vector<double> breaks; // k-1 ascending cut values (upper bound of each lower class)
    std::vector<int> labels;    // per-observation class index in 0..k-1, original order
    double ssw = 0.0;           // total within-class sum of squared deviations
    double sst = 0.0;           // total sum of squared deviations
    double gvf = 0.0;           // goodness of variance fit, 1 - SSW/SST
};

/// Fisher-Jenks natural breaks: the exact partition of the sorted values
/// into k contiguous classes minimizing the total within-class sum of
/// squared deviations. Dynamic program over class count and start
/// position with prefix-sum interval costs, O(k n^2). Among partitions
/// with equal cost, the one with lexicographically smallest break
/// positions is returned.
inline Classification fisher_jenks(const std::vector<double>& y, int k) {
    const std::size_t n = y.size();
    require(k >= 1, "class count must be at least 1, got ", k);
    require(n >= 1, "cannot classify an empty vector");

    // Sort with a stable tie-break on the original index so labels are
    // reproducible and non-decreasing along the sorted order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return y[a] < y[b] || (y[a] == y[b] && a < b); });
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = y[order[i]];

    std::size_t distinct = 1;
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] != v[i - 1])
            ++distinct;
    require(distinct >= static_cast<std::size_t>(k), "need at least ", k,
            " distinct values for ", k, " classes, got ", distinct);

    // Prefix sums for O(1) interval cost: SSQ of v[i..j] about its mean.
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s1[i + 1] = s1[i] + v[i];
        s2[i + 1] = s2[i] + v[i] * v[i];
    }
    auto cost = [&](std::size_t i, std::size_t j) {
        const double sum = s1[j + 1] - s1[i];
        const double sumsq = s2[j + 1] - s2[i];
        const double len = static_cast<double>(j - i + 1);
        const double c = sumsq - sum * sum / len;
        return c > 0.0 ? c : 0.0;
    };

    // Suffix dynamic program: best[c][i] = minimal cost of splitting
    // v[i..n-1] into c classes. Reconstructing from the front and taking
    // the first split position that reproduces the optimum yields the
    // lexicographically smallest break sequence.
    const std::size_t kk = static_cast<std::size_t>(k);
    std::vector<std::vector<double>> best(kk + 1,
                                          std::vector<double>(n + 1, std::numeric_limits<double>::infinity()));
    for (std::size_t i = 0; i < n; ++i)
        best[1][i] = cost(i, n - 1);
    for (std::size_t c = 2; c <= kk; ++c) {
        // v[i..] must leave c-1 values for the remaining classes.
        for (std::size_t i = 0; i + c <= n; ++i) {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t e = i; e + c - 1 < n; ++e) {
                const double candidate = cost(i, e) + best[c - 1][e + 1];
                if (candidate < m)
                    m = candidate;
            }
            best[c][i] = m;
        }
    }

    Classification result;
    result.k = k;
    result.sst = cost(0, n - 1);
    result.ssw = best[kk][0];
    result.labels.assign(n, 0);

    std::size_t start = 0;
    for (std::size_t c = kk; c >= 1; --c) {
        std::size_t end = n - 1;
        if (c > 1) {
            for (std::size_t e = start; e + c - 1 < n; ++e) {
                if (cost(start, e) + best[c - 1][e + 1] == best[c][start]) {
                    end = e;
                    break;
                }
            }
            result.breaks.push_back(v[end]);
        }
        const int label = static_cast<int>(kk - c);
        for (std::size_t i = start; i <= end; ++i)
            result.labels[order[i]] = label;
        start = end + 1;
    }
    result.gvf = result.sst > 0.0 ? 1.0 - result.ssw / result.sst : 1.0;
    return result;
}

} // namespace regionlab
