#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "regionlab/error.hpp"
#include "regionlab/geometry.hpp"
#include "regionlab/ingest.hpp"
#include "regionlab/pca.hpp"
#include "regionlab/weights.hpp"

namespace regionlab {

// ---------------------------------------------------------------------------
// Spatially constrained Ward clustering
// ---------------------------------------------------------------------------

/// Full agglomerative merge history. Merges are recorded bottom-up; the
/// first entry joins two single provinces, and cutting the sequence after
/// n - K merges yields the K-cluster assignment. Because every assignment
/// is a prefix of one history, the K-region partition always refines the
/// (K-1)-region partition by exactly one merge.
class WardTree {
public:
    WardTree(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> merges)
        : n_(n), merges_(std::move(merges)) {}

    std::size_t size() const { return n_; }

    /// Number of clusters left when no further constrained merge exists;
    /// 1 for a connected graph, the component count otherwise.
    std::size_t min_clusters() const { return n_ - merges_.size(); }

    /// Labels for the K-cluster cut, compressed to 0..K-1 in order of
    /// first appearance along the province order.
    std::vector<int> cut(int n_regions) const {
        require(n_regions >= 1 && static_cast<std::size_t>(n_regions) <= n_,
                "region count must lie in 1..", n_, ", got ", n_regions);
        require(static_cast<std::size_t>(n_regions) >= min_clusters(),
            "graph has ", min_clusters(), " connected components; cannot form ",
            n_regions, " connected regions");
        std::vector<std::size_t> parent(n_);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
            while (parent[i] != i) {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            return i;
        };
        const std::size_t n_merges = n_ - static_cast<std::size_t>(n_regions);
        for (std::size_t t = 0; t < n_merges; ++t)
            parent[find(merges_[t].second)] = find(merges_[t].first);

        std::vector<int> labels(n_, -1);
        std::vector<int> label_of_root(n_, -1);
        int next = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t root = find(i);
            if (label_of_root[root] < 0)
                label_of_root[root] = next++;
            labels[i] = label_of_root[root];
        }
        return labels;
    }

private:
    std::size_t n_;
    std::vector<std::pair<std::size_t, std::size_t>> merges_;
};

/// Agglomerative Ward clustering restricted to a contiguity graph: only
/// clusters adjacent in the (symmetrized) graph may merge, and a merged
/// cluster inherits the union of its members' adjacencies, so every
/// cluster stays connected. The merge cost is the Ward increase in total
/// within-cluster squared error,
///   dSSE = (|a||b| / (|a|+|b|)) * ||mu_a - mu_b||^2,
/// with ties broken by the lexicographically smallest pair of minimum
/// member indices. Merging continues while any adjacent pair remains.
inline WardTree ward_tree(const Eigen::MatrixXd& features,
                          const std::vector<std::vector<std::size_t>>& adjacency) {
    const std::size_t n = static_cast<std::size_t>(features.rows());
    require(n >= 1, "need at least one unit");
    require(adjacency.size() == n, "adjacency size mismatch");

    // Clusters are keyed by their minimum member index, which is stable
    // under merges when the smaller key survives.
    std::vector<char> alive(n, 1);
    std::vector<double> size(n, 1.0);
    std::vector<Eigen::VectorXd> mean(n);
    std::vector<std::set<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        mean[i] = features.row(static_cast<Eigen::Index>(i)).transpose();
        for (std::size_t j : adjacency[i]) {
            require(j < n, "adjacency index out of range");
            if (j != i) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> merges;
    merges.reserve(n - 1);
    while (true) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_a = n, best_b = n;
        for (std::size_t a = 0; a < n; ++a) {
            if (!alive[a])
                continue;
            for (std::size_t b : adj[a]) {
                if (b <= a)
                    continue;
                const double delta =
                    size[a] * size[b] / (size[a] + size[b]) * (mean[a] - mean[b]).squaredNorm();
                if (delta < best || (delta == best && (a < best_a || (a == best_a && b < best_b)))) {
                    best = delta;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a == n)
            break; // no adjacent pair left: one cluster, or disconnected components

        mean[best_a] = (size[best_a] * mean[best_a] + size[best_b] * mean[best_b]) /
                       (size[best_a] + size[best_b]);
        size[best_a] += size[best_b];
        alive[best_b] = 0;
        adj[best_a].erase(best_b);
        for (std::size_t c : adj[best_b]) {
            if (c == best_a)
                continue;
            adj[c].erase(best_b);
            adj[c].insert(best_a);
            adj[best_a].insert(c);
        }
        adj[best_b].clear();
        merges.emplace_back(best_a, best_b);
    }
    return WardTree(n, std::move(merges));
}

struct RegionAssignment {
    int n_regions = 0;
    std::vector<int> labels;                       // per-province region index
    std::vector<std::vector<std::size_t>> members; // per-region province indices
};

inline RegionAssignment make_assignment(const std::vector<int>& labels, int n_regions) {
    RegionAssignment assignment;
    assignment.n_regions = n_regions;
    assignment.labels = labels;
    assignment.members.resize(static_cast<std::size_t>(n_regions));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] >= 0 && labels[i] < n_regions, "label out of range");
        assignment.members[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    for (std::size_t r = 0; r < assignment.members.size(); ++r)
        require(!assignment.members[r].empty(), "region ", r, " is empty");
    return assignment;
}

/// Clusters standardized features into n_regions connected regions.
inline RegionAssignment constrained_ward(const Eigen::MatrixXd& features,
                                         const std::vector<std::vector<std::size_t>>& adjacency,
                                         int n_regions) {
    const WardTree tree = ward_tree(features, adjacency);
    return make_assignment(tree.cut(n_regions), n_regions);
}

/// Dissolves each region's member polygons into one geometry.
inline std::vector<RegionGeometry> dissolve_regions(const RegionAssignment& assignment,
                                                    const std::vector<RegionGeometry>& geometries) {
    require(assignment.labels.size() == geometries.size(), "label/geometry count mismatch");
    std::vector<RegionGeometry> dissolved;
    for (std::size_t r = 0; r < assignment.members.size(); ++r) {
        std::vector<RegionGeometry> parts;
        for (std::size_t i : assignment.members[r])
            parts.push_back(geometries[i]);
        dissolved.push_back(dissolve(parts, ProvinceId{"region_" + std::to_string(r + 1),
                                                       "Region " + std::to_string(r + 1)}));
    }
    return dissolved;
}

// ---------------------------------------------------------------------------
// Feature-coherence scores
// ---------------------------------------------------------------------------

/// Mean silhouette over all points under Euclidean distance: per point,
/// (b - a) / max(a, b) with a the mean distance to its own cluster and b
/// the smallest mean distance to another cluster. Singleton-cluster
/// points, and points where both a and b vanish, contribute 0.
inline double silhouette(const Eigen::MatrixXd& features, const std::vector<int>& labels) {
    const std::size_t n = static_cast<std::size_t>(features.rows());
    require(labels.size() == n, "label/feature count mismatch");
    require(n >= 3, "silhouette needs at least 3 points");
    const int c = *std::max_element(labels.begin(), labels.end()) + 1;
    require(c >= 2, "silhouette needs at least 2 clusters");

    std::vector<double> count(static_cast<std::size_t>(c), 0.0);
    for (int label : labels) {
        require(label >= 0, "negative label");
        count[static_cast<std::size_t>(label)] += 1.0;
    }
    for (int g = 0; g < c; ++g)
        require(count[static_cast<std::size_t>(g)] > 0.0, "cluster ", g, " is empty");

    double total = 0.0;
    std::vector<double> dist_sum(static_cast<std::size_t>(c));
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            const double d = (features.row(static_cast<Eigen::Index>(i)) -
                              features.row(static_cast<Eigen::Index>(j)))
                                 .norm();
            dist_sum[static_cast<std::size_t>(labels[j])] += d;
        }
        const std::size_t own = static_cast<std::size_t>(labels[i]);
        if (count[own] <= 1.0)
            continue; // singleton contributes 0
        const double a = dist_sum[own] / (count[own] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < static_cast<std::size_t>(c); ++g)
            if (g != own)
                b = std::min(b, dist_sum[g] / count[g]);
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(n);
}

/// Sentinel returned when the within-cluster scatter is exactly zero.
inline constexpr double kCalinskiHarabaszCap = 1e15;

/// Calinski-Harabasz variance-ratio score:
///   [trace(B)/(c-1)] / [trace(W)/(n-c)]
/// with B and W the between- and within-cluster scatter matrices.
inline double calinski_harabasz(const Eigen::MatrixXd& features, const std::vector<int>& labels) {
    const std::size_t n = static_cast<std::size_t>(features.rows());
    require(labels.size() == n, "label/feature count mismatch");
    const int c = *std::max_element(labels.begin(), labels.end()) + 1;
    require(c >= 2 && static_cast<std::size_t>(c) <= n - 1, "cluster count ", c,
            " out of range 2..", n - 1);

    const Eigen::RowVectorXd grand = features.colwise().mean();
    Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(c, features.cols());
    std::vector<double> count(static_cast<std::size_t>(c), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        require(labels[i] >= 0, "negative label");
        centroid.row(labels[i]) += features.row(static_cast<Eigen::Index>(i));
        count[static_cast<std::size_t>(labels[i])] += 1.0;
    }
    double between = 0.0;
    for (int g = 0; g < c; ++g) {
        require(count[static_cast<std::size_t>(g)] > 0.0, "cluster ", g, " is empty");
        centroid.row(g) /= count[static_cast<std::size_t>(g)];
        between += count[static_cast<std::size_t>(g)] * (centroid.row(g) - grand).squaredNorm();
    }
    double within = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        within += (features.row(static_cast<Eigen::Index>(i)) - centroid.row(labels[i]))
                      .squaredNorm();
    if (within == 0.0)
        return kCalinskiHarabaszCap;
    return (between / static_cast<double>(c - 1)) /
           (within / static_cast<double>(n - static_cast<std::size_t>(c)));
}

// ---------------------------------------------------------------------------
// Region-count sweep
// ---------------------------------------------------------------------------

struct CandidateScore {
    int n_regions = 0;
    double mean_ipq = 0.0;
    double silhouette = 0.0;
    double calinski_harabasz = 0.0;
    double norm_ipq = 0.0;
    double norm_silhouette = 0.0;
    double norm_ch = 0.0;
    double combined_silhouette = 0.0; // norm_ipq + norm_silhouette
    double combined_ch = 0.0;         // norm_ipq + norm_ch
};

struct CoherenceScores {
    std::vector<CandidateScore> candidates;
    int best_by_silhouette = 0; // argmax of combined_silhouette
    int best_by_ch = 0;         // argmax of combined_ch
};

namespace detail {

/// Min-max normalization across the sweep; a flat metric maps to 0.5.
inline std::vector<double> min_max(const std::vector<double>& values) {
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size(), 0.5);
    if (hi > lo)
        for (std::size_t i = 0; i < values.size(); ++i)
            out[i] = (values[i] - lo) / (hi - lo);
    return out;
}

} // namespace detail

/// Evaluates every region count in [lo, hi]: cluster, dissolve, then score
/// geographic coherence (mean isoperimetric quotient of the dissolved
/// regions) and feature coherence (silhouette and Calinski-Harabasz on the
/// standardized features). Each metric is min-max normalized across the
/// sweep and the combined scores add geographic and feature coherence.
inline CoherenceScores sweep_regions(const FeatureTable& features, const SpatialWeights& weights,
                                     const std::vector<RegionGeometry>& geometries, int lo = 2,
                                     int hi = 9) {
    require(lo >= 2, "sweep must start at 2 or more regions, got ", lo);
    require(hi >= lo, "empty sweep range ", lo, "..", hi);
    require(static_cast<std::size_t>(hi) <= geometries.size() - 1, "sweep upper bound ", hi,
            " too large for ", geometries.size(), " provinces");
    validate(features);
    require(features.provinces.size() == geometries.size(), "feature/geometry count mismatch");

    const Eigen::MatrixXd standardized = standardize(features);
    const WardTree tree = ward_tree(standardized, weights.symmetric_adjacency());

    CoherenceScores scores;
    std::vector<double> ipqs, sils, chs;
    for (int K = lo; K <= hi; ++K) {
        const RegionAssignment assignment = make_assignment(tree.cut(K), K);
        const std::vector<RegionGeometry> dissolved = dissolve_regions(assignment, geometries);
        double ipq_sum = 0.0;
        for (const RegionGeometry& region : dissolved)
            ipq_sum += ipq(region);
        CandidateScore candidate;
        candidate.n_regions = K;
        candidate.mean_ipq = ipq_sum / static_cast<double>(dissolved.size());
        candidate.silhouette = silhouette(standardized, assignment.labels);
        candidate.calinski_harabasz = calinski_harabasz(standardized, assignment.labels);
        ipqs.push_back(candidate.mean_ipq);
        sils.push_back(candidate.silhouette);
        chs.push_back(candidate.calinski_harabasz);
        scores.candidates.push_back(candidate);
    }

    const std::vector<double> norm_ipq = detail::min_max(ipqs);
    const std::vector<double> norm_sil = detail::min_max(sils);
    const std::vector<double> norm_ch = detail::min_max(chs);
    double best_sil = -std::numeric_limits<double>::infinity();
    double best_ch = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scores.candidates.size(); ++i) {
        CandidateScore& candidate = scores.candidates[i];
        candidate.norm_ipq = norm_ipq[i];
        candidate.norm_silhouette = norm_sil[i];
        candidate.norm_ch = norm_ch[i];
        candidate.combined_silhouette = candidate.norm_ipq + candidate.norm_silhouette;
        candidate.combined_ch = candidate.norm_ipq + candidate.norm_ch;
        if (candidate.combined_silhouette > best_sil) {
            best_sil = candidate.combined_silhouette;
            scores.best_by_silhouette = candidate.n_regions;
        }
        if (candidate.combined_ch > best_ch) {
            best_ch = candidate.combined_ch;
            scores.best_by_ch = candidate.n_regions;
        }
    }
    return scores;
}

} // namespace regionlab
