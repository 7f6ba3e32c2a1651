#pragma once

// Shared utilities for the test suite: independent oracles and small
// generators kept deliberately separate from the library implementations.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <regionlab/ingest.hpp>
#include <regionlab/rng.hpp>
#include <regionlab/synth.hpp>
#include <regionlab/weights.hpp>

namespace testutil {

/// Spatial lag computed through an explicit dense matrix, as a cross-check
/// for the sparse adjacency-list implementation.
inline std::vector<double> dense_lag(const regionlab::SpatialWeights& w,
                                     const std::vector<double>& x) {
    const std::size_t n = w.size();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nbrs = w.neighbors(i);
        const auto& wts = w.weights(i);
        for (std::size_t m = 0; m < nbrs.size(); ++m)
            dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nbrs[m])) = wts[m];
    }
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd lag = dense * xv;
    return std::vector<double>(lag.data(), lag.data() + lag.size());
}

/// Moran statistic computed directly from the dense weight matrix:
/// I = (n/S0) * sum_ij w_ij z_i z_j / sum_i z_i^2 with z centered.
inline double dense_moran(const regionlab::SpatialWeights& w, const std::vector<double>& x) {
    const std::size_t n = x.size();
    double m = 0.0;
    for (double v : x)
        m += v;
    m /= static_cast<double>(n);
    std::vector<double> z;
    for (double v : x)
        z.push_back(v - m);
    double s0 = 0.0, cross = 0.0, ssd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nbrs = w.neighbors(i);
        const auto& wts = w.weights(i);
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
            s0 += wts[j];
            cross += wts[j] * z[i] * z[nbrs[j]];
        }
        ssd += z[i] * z[i];
    }
    return (static_cast<double>(n) / s0) * cross / ssd;
}

/// A feature table with the given number of random columns, attached to the
/// given geometries. Column values are iid normal.
inline regionlab::FeatureTable random_features(const std::vector<regionlab::RegionGeometry>& geoms,
                                               std::size_t columns, std::uint64_t seed) {
    regionlab::Rng rng(seed);
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    for (std::size_t c = 0; c < columns; ++c) {
        std::vector<double> values;
        for (std::size_t i = 0; i < geoms.size(); ++i)
            values.push_back(rng.normal());
        cols.emplace_back("f" + std::to_string(c + 1), std::move(values));
    }
    regionlab::FeatureTable table;
    for (const auto& g : geoms)
        table.provinces.push_back(g.id);
    table.values.resize(static_cast<Eigen::Index>(geoms.size()),
                        static_cast<Eigen::Index>(columns));
    for (std::size_t c = 0; c < columns; ++c) {
        table.factors.push_back({cols[c].first, regionlab::FactorAspect::Other, 1});
        for (std::size_t i = 0; i < geoms.size(); ++i)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                cols[c].second[i];
    }
    return table;
}

/// Minimal XML well-formedness check: tags balance, attributes are quoted,
/// and the document has a single root. Good enough to catch malformed SVG.
inline bool well_formed_xml(const std::string& text, std::string* why = nullptr) {
    auto fail = [&](const std::string& message) {
        if (why)
            *why = message;
        return false;
    };
    std::vector<std::string> stack;
    std::size_t i = 0;
    const std::size_t n = text.size();
    int roots = 0;
    while (i < n) {
        if (text[i] != '<') {
            if (text[i] == '>')
                return fail("stray '>' outside a tag");
            ++i;
            continue;
        }
        if (text.compare(i, 4, "<!--") == 0) {
            const std::size_t end = text.find("-->", i + 4);
            if (end == std::string::npos)
                return fail("unterminated comment");
            i = end + 3;
            continue;
        }
        if (text.compare(i, 2, "<?") == 0) {
            const std::size_t end = text.find("?>", i + 2);
            if (end == std::string::npos)
                return fail("unterminated declaration");
            i = end + 2;
            continue;
        }
        std::size_t close = i + 1;
        bool in_quote = false;
        char quote = '"';
        while (close < n) {
            const char c = text[close];
            if (in_quote) {
                if (c == quote)
                    in_quote = false;
            } else if (c == '"' || c == '\'') {
                in_quote = true;
                quote = c;
            } else if (c == '>') {
                break;
            } else if (c == '<') {
                return fail("nested '<' inside a tag");
            }
            ++close;
        }
        if (close >= n)
            return fail("unterminated tag");
        std::string body = text.substr(i + 1, close - i - 1);
        const bool closing = !body.empty() && body.front() == '/';
        const bool self_closing = !body.empty() && body.back() == '/';
        if (closing)
            body.erase(body.begin());
        if (self_closing)
            body.pop_back();
        std::string name;
        for (char c : body) {
            if (std::isspace(static_cast<unsigned char>(c)))
                break;
            name.push_back(c);
        }
        if (name.empty())
            return fail("empty tag name");
        if (closing) {
            if (stack.empty() || stack.back() != name)
                return fail("mismatched closing tag </" + name + ">");
            stack.pop_back();
        } else if (!self_closing) {
            if (stack.empty())
                ++roots;
            stack.push_back(name);
        } else if (stack.empty()) {
            ++roots;
        }
        i = close + 1;
    }
    if (!stack.empty())
        return fail("unclosed tag <" + stack.back() + ">");
    if (roots != 1)
        return fail("expected exactly one root element");
    return true;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Synthetic local-regression scenario shared by the unit tests and the
/// calibration checks: income regressed on education over a square grid.
struct GwrScenario {
    std::vector<regionlab::RegionGeometry> geoms;
    regionlab::SpatialWeights weights;
    std::vector<double> x; // years of education
    std::vector<double> y; // monthly income
    double slope = 0.0;    // true education effect
};

/// Twice-smoothed iid normal surface: neighbors share most of their
/// value, so the field varies slowly at the footprint scale.
inline std::vector<double> smooth_surface(const regionlab::SpatialWeights& w,
                                          std::uint64_t seed) {
    regionlab::Rng rng(seed);
    std::vector<double> z(w.size());
    for (double& v : z)
        v = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
        const std::vector<double> lagged = w.lag(z);
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] = 0.5 * (z[i] + lagged[i]);
    }
    return z;
}

/// Well-specified data: one global education slope plus iid noise, nothing
/// spatial. A local regression with education as its only covariate fits
/// this correctly, so residuals should carry no spatial structure.
inline GwrScenario gwr_well_specified(std::uint64_t seed) {
    GwrScenario s;
    s.geoms = regionlab::grid_geometries(8, 8);
    s.weights = regionlab::SpatialWeights::knn(s.geoms, 5);
    s.slope = 300.0;
    regionlab::Rng rng(seed);
    for (std::size_t i = 0; i < s.geoms.size(); ++i) {
        const double xi = rng.uniform(8.0, 14.0);
        s.x.push_back(xi);
        s.y.push_back(3000.0 + s.slope * xi + rng.normal() * 200.0);
    }
    return s;
}

/// Misspecified data: income also depends on a spatially smooth covariate
/// that the regression never sees. Its footprint-scale variation cannot be
/// absorbed by the local intercepts, so residuals inherit its spatial
/// structure.
inline GwrScenario gwr_omitted_variable(std::uint64_t seed) {
    GwrScenario s;
    s.geoms = regionlab::grid_geometries(10, 10);
    s.weights = regionlab::SpatialWeights::knn(s.geoms, 5);
    s.slope = 300.0;
    regionlab::Rng rng(seed);
    const std::vector<double> omitted =
        smooth_surface(s.weights, regionlab::derive_seed(seed, 2));
    for (std::size_t i = 0; i < s.geoms.size(); ++i) {
        const double xi = rng.uniform(8.0, 14.0);
        s.x.push_back(xi);
        s.y.push_back(2000.0 + s.slope * xi + 3000.0 * omitted[i] + rng.normal() * 500.0);
    }
    return s;
}

} // namespace testutil
