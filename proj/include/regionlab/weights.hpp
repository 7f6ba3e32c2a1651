#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "regionlab/error.hpp"
#include "regionlab/geometry.hpp"
#include "regionlab/jsonio.hpp"

namespace regionlab {

/// Row-standardized spatial weights over a fixed set of units. Each unit
/// holds a sorted neighbor index list and matching positive weights that
/// sum to one, so the weighted neighborhood average (the spatial lag) is a
/// convex combination of neighboring values.
class SpatialWeights {
public:
    SpatialWeights() = default;

    /// k-nearest-neighbor weights from unit centroids under Euclidean
    /// distance. Distance ties at the k-th position are broken by unit
    /// index, so the graph is fully determined by the inputs. Every row
    /// gets exactly k neighbors with weight 1/k.
    static SpatialWeights knn(const std::vector<Point>& centroids,
                              std::vector<std::string> ids, int k) {
        const std::size_t n = centroids.size();
        require(k >= 1, "k must be at least 1, got ", k);
        require(n > static_cast<std::size_t>(k), "need more than k=", k, " units, got ", n);
        require(ids.size() == n, "ids/centroids size mismatch");

        SpatialWeights w;
        w.ids_ = std::move(ids);
        w.k_ = k;
        w.neighbors_.resize(n);
        w.weights_.resize(n);
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = 0; i < n; ++i) {
            order.clear();
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                const double dx = centroids[j].x - centroids[i].x;
                const double dy = centroids[j].y - centroids[i].y;
                order.emplace_back(dx * dx + dy * dy, j);
            }
            std::partial_sort(order.begin(), order.begin() + k, order.end());
            auto& row = w.neighbors_[i];
            for (int m = 0; m < k; ++m)
                row.push_back(order[static_cast<std::size_t>(m)].second);
            std::sort(row.begin(), row.end());
            w.weights_[i].assign(static_cast<std::size_t>(k), 1.0 / static_cast<double>(k));
        }
        return w;
    }

    static SpatialWeights knn(const std::vector<RegionGeometry>& geometries, int k) {
        std::vector<Point> centroids;
        std::vector<std::string> ids;
        for (const RegionGeometry& g : geometries) {
            centroids.push_back(g.centroid);
            ids.push_back(g.id.id);
        }
        return knn(centroids, std::move(ids), k);
    }

    /// Builds weights from explicit neighbor lists; each row is
    /// standardized to weight 1/degree. Used for regular lattices whose
    /// adjacency is known a priori.
    static SpatialWeights from_neighbor_lists(std::vector<std::string> ids,
                                              std::vector<std::vector<std::size_t>> neighbors) {
        const std::size_t n = ids.size();
        require(neighbors.size() == n, "ids/neighbors size mismatch");
        SpatialWeights w;
        w.ids_ = std::move(ids);
        w.neighbors_ = std::move(neighbors);
        w.weights_.resize(n);
        std::size_t common_degree = 0;
        bool uniform = true;
        for (std::size_t i = 0; i < n; ++i) {
            auto& row = w.neighbors_[i];
            std::sort(row.begin(), row.end());
            require(std::adjacent_find(row.begin(), row.end()) == row.end(),
                    "duplicate neighbor in row ", i);
            require(!row.empty(), "unit ", i, " has no neighbors");
            for (std::size_t j : row) {
                require(j < n, "neighbor index ", j, " out of range");
                require(j != i, "unit ", i, " lists itself as a neighbor");
            }
            if (i == 0)
                common_degree = row.size();
            else if (row.size() != common_degree)
                uniform = false;
            w.weights_[i].assign(row.size(), 1.0 / static_cast<double>(row.size()));
        }
        w.k_ = uniform ? static_cast<int>(common_degree) : 0;
        return w;
    }

    std::size_t size() const { return ids_.size(); }
    int k() const { return k_; }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }
    const std::vector<double>& weights(std::size_t i) const { return weights_[i]; }

    /// Weighted neighborhood average (Wx)_i = sum_j w_ij x_j.
    std::vector<double> lag(const std::vector<double>& x) const {
        require(x.size() == size(), "lag input has ", x.size(), " values for ", size(), " units");
        std::vector<double> out(x.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            double acc = 0.0;
            for (std::size_t m = 0; m < neighbors_[i].size(); ++m)
                acc += weights_[i][m] * x[neighbors_[i][m]];
            out[i] = acc;
        }
        return out;
    }

    /// Undirected adjacency: i and j are adjacent if either lists the
    /// other as a neighbor. Rows come back sorted.
    std::vector<std::vector<std::size_t>> symmetric_adjacency() const {
        std::vector<std::vector<std::size_t>> adj(size());
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j : neighbors_[i]) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        for (auto& row : adj) {
            std::sort(row.begin(), row.end());
            row.erase(std::unique(row.begin(), row.end()), row.end());
        }
        return adj;
    }

    /// True if the symmetrized graph has a single connected component.
    bool connected() const {
        if (size() == 0)
            return true;
        const auto adj = symmetric_adjacency();
        std::vector<char> seen(size(), 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t visited = 1;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j : adj[i])
                if (!seen[j]) {
                    seen[j] = 1;
                    ++visited;
                    stack.push_back(j);
                }
        }
        return visited == size();
    }

    json to_json() const {
        json obj;
        obj["k"] = k_;
        obj["n"] = size();
        obj["ids"] = ids_;
        json neighbor_rows = json::array();
        json weight_rows = json::array();
        for (std::size_t i = 0; i < size(); ++i) {
            neighbor_rows.push_back(neighbors_[i]);
            weight_rows.push_back(round12_array(weights_[i]));
        }
        obj["neighbors"] = std::move(neighbor_rows);
        obj["weights"] = std::move(weight_rows);
        return obj;
    }

private:
    std::vector<std::string> ids_;
    std::vector<std::vector<std::size_t>> neighbors_;
    std::vector<std::vector<double>> weights_;
    int k_ = 0;
};

} // namespace regionlab
