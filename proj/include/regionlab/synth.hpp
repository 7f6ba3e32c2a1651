#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "regionlab/bayes.hpp"
#include "regionlab/error.hpp"
#include "regionlab/geometry.hpp"
#include "regionlab/ingest.hpp"
#include "regionlab/rng.hpp"
#include "regionlab/weights.hpp"

namespace regionlab {

namespace detail {

inline std::string padded_id(char prefix, std::size_t index, std::size_t count) {
    std::size_t width = 1;
    for (std::size_t v = count; v >= 10; v /= 10)
        ++width;
    std::string digits = std::to_string(index + 1);
    return std::string(1, prefix) + std::string(width - std::min(width, digits.size()), '0') +
           digits;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Layouts
// ---------------------------------------------------------------------------

/// rows x cols unit-square cells, row-major from the bottom-left corner.
inline std::vector<RegionGeometry> grid_geometries(int rows, int cols) {
    require(rows >= 1 && cols >= 1, "grid needs positive dimensions");
    std::vector<RegionGeometry> cells;
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double x = static_cast<double>(c);
            const double y = static_cast<double>(r);
            const std::size_t index = static_cast<std::size_t>(r) * cols + c;
            const std::string id = detail::padded_id('c', index, n);
            cells.push_back(make_region(
                ProvinceId{id, id},
                {PolygonPart{{{x, y}, {x + 1, y}, {x + 1, y + 1}, {x, y + 1}, {x, y}}, {}}}));
        }
    return cells;
}

/// Rook adjacency on a torus: each cell borders its four lattice
/// neighbors with wraparound, so every row of the resulting weights has
/// exactly four entries of 1/4 and the matrix is symmetric. Useful for
/// lattice statistics that need constant degree with no boundary effects.
inline std::vector<std::vector<std::size_t>> torus_rook_neighbors(int rows, int cols) {
    require(rows >= 3 && cols >= 3, "torus needs at least 3x3 cells");
    std::vector<std::vector<std::size_t>> neighbors;
    auto at = [&](int r, int c) {
        return static_cast<std::size_t>(((r + rows) % rows) * cols + (c + cols) % cols);
    };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            neighbors.push_back({at(r - 1, c), at(r + 1, c), at(r, c - 1), at(r, c + 1)});
    return neighbors;
}

/// Alternating +1/-1 field; adjacent rook neighbors always disagree.
inline std::vector<double> checkerboard_field(int rows, int cols) {
    std::vector<double> field;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            field.push_back((r + c) % 2 == 0 ? 1.0 : -1.0);
    return field;
}

/// Voronoi cells of n random sites in the [0, extent]^2 box, each cell
/// obtained by clipping the box with the perpendicular-bisector
/// half-plane against every other site. Cells are convex, strictly
/// positive in area, and tile the box.
inline std::vector<RegionGeometry> voronoi_geometries(std::size_t n, std::uint64_t seed,
                                                      double extent = 10.0) {
    require(n >= 3, "need at least 3 sites");
    require(extent > 0.0, "extent must be positive");
    Rng rng(seed);
    std::vector<Point> sites;
    for (std::size_t i = 0; i < n; ++i)
        sites.push_back({rng.uniform(0.0, extent), rng.uniform(0.0, extent)});

    std::vector<RegionGeometry> cells;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Point> poly = {
            {0.0, 0.0}, {extent, 0.0}, {extent, extent}, {0.0, extent}};
        for (std::size_t j = 0; j < n && poly.size() >= 3; ++j) {
            if (j == i)
                continue;
            // Keep the side of the bisector closer to site i.
            const double dx = sites[j].x - sites[i].x;
            const double dy = sites[j].y - sites[i].y;
            const double mx = 0.5 * (sites[i].x + sites[j].x);
            const double my = 0.5 * (sites[i].y + sites[j].y);
            auto side = [&](const Point& p) { return (p.x - mx) * dx + (p.y - my) * dy; };
            std::vector<Point> clipped;
            for (std::size_t v = 0; v < poly.size(); ++v) {
                const Point& p = poly[v];
                const Point& q = poly[(v + 1) % poly.size()];
                const double fp = side(p);
                const double fq = side(q);
                if (fp <= 0.0)
                    clipped.push_back(p);
                if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
                    const double t = fp / (fp - fq);
                    clipped.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
                }
            }
            poly = std::move(clipped);
        }
        require(poly.size() >= 3, "degenerate Voronoi cell ", i, "; try another seed");
        poly.push_back(poly.front());
        const std::string id = detail::padded_id('v', i, n);
        cells.push_back(make_region(ProvinceId{id, id}, {PolygonPart{std::move(poly), {}}}));
    }
    return cells;
}

// ---------------------------------------------------------------------------
// Fields and tables
// ---------------------------------------------------------------------------

/// Spatial moving-average field y = e + rho * lag(e) with iid standard
/// normal e: each value mixes its own noise with the neighborhood
/// average, giving positive spatial autocorrelation that grows with rho.
inline std::vector<double> autocorrelated_field(const SpatialWeights& w, double rho,
                                                std::uint64_t seed) {
    require(std::abs(rho) < 1.0, "|rho| must be below 1, got ", rho);
    Rng rng(seed);
    std::vector<double> noise(w.size());
    for (double& v : noise)
        v = rng.normal();
    const std::vector<double> lagged = w.lag(noise);
    for (std::size_t i = 0; i < noise.size(); ++i)
        noise[i] += rho * lagged[i];
    return noise;
}

/// Assembles a FeatureTable from named columns; metadata for columns that
/// are not canonical poverty factors defaults to a neutral factor.
inline FeatureTable make_feature_table(const std::vector<RegionGeometry>& geometries,
                                       const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
    require(!columns.empty(), "need at least one column");
    FeatureTable table;
    for (const RegionGeometry& g : geometries)
        table.provinces.push_back(g.id);
    table.values.resize(static_cast<Eigen::Index>(geometries.size()),
                        static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        require(columns[c].second.size() == geometries.size(), "column '", columns[c].first,
                "' has wrong length");
        table.factors.push_back(factor_metadata(columns[c].first));
        for (std::size_t i = 0; i < geometries.size(); ++i)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                columns[c].second[i];
    }
    validate(table);
    return table;
}

// ---------------------------------------------------------------------------
// Regression oracle
// ---------------------------------------------------------------------------

/// Ground truth for the income-on-education generator. beta holds either
/// one shared slope or one slope per region.
struct RegressionTruth {
    std::vector<double> alpha; // per region
    std::vector<double> beta;  // size 1 (shared) or n_regions
    std::vector<double> sigma; // per region
};

/// Generates province-level data from the regression model itself:
/// X ~ Uniform[8, 14] years of education, and
/// Y = alpha_j + beta_j (X - regional mean X) + Laplace(0, sigma_j) noise.
/// The centering uses the realized regional mean, matching the model's
/// design column exactly.
inline RegressionData hierarchical_income_data(int n_regions, int provinces_per_region,
                                               const RegressionTruth& truth,
                                               std::uint64_t seed) {
    require(n_regions >= 1, "need at least one region");
    require(provinces_per_region >= 2, "need at least 2 provinces per region");
    const std::size_t J = static_cast<std::size_t>(n_regions);
    require(truth.alpha.size() == J, "truth.alpha must have one entry per region");
    require(truth.beta.size() == 1 || truth.beta.size() == J,
            "truth.beta must be shared (size 1) or per region");
    require(truth.sigma.size() == J, "truth.sigma must have one entry per region");
    for (double s : truth.sigma)
        require(s > 0.0, "sigma must be positive");

    Rng rng(seed);
    std::vector<double> x, y;
    std::vector<int> region;
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<double> xs(static_cast<std::size_t>(provinces_per_region));
        double sum = 0.0;
        for (double& v : xs) {
            v = rng.uniform(8.0, 14.0);
            sum += v;
        }
        const double xbar = sum / static_cast<double>(provinces_per_region);
        const double beta_j = truth.beta.size() == 1 ? truth.beta[0] : truth.beta[j];
        for (double v : xs) {
            x.push_back(v);
            y.push_back(truth.alpha[j] + beta_j * (v - xbar) +
                        rng.laplace(0.0, truth.sigma[j]));
            region.push_back(static_cast<int>(j));
        }
    }
    return make_regression_data(std::move(x), std::move(y), std::move(region), n_regions);
}

// ---------------------------------------------------------------------------
// Planted-region scenario
// ---------------------------------------------------------------------------

struct PlantedScenario {
    std::vector<RegionGeometry> geometries;
    FeatureTable features;
    std::vector<int> true_labels; // 6 planted blocks
};

/// 12x8 grid of unit cells carrying one feature column with six planted
/// 4x4 blocks. Block means snake through {0,10,20,50,40,30} so only
/// neighboring blocks have the minimal gap of 10, and the added noise
/// (sd 0.05) is far below every gap: constrained clustering recovers the
/// blocks exactly at six regions, and six squares beat any coarser or
/// finer cut on compactness.
inline PlantedScenario planted_blocks_scenario(std::uint64_t seed) {
    constexpr int rows = 8, cols = 12;
    PlantedScenario scenario;
    scenario.geometries = grid_geometries(rows, cols);

    const double block_mean[2][3] = {{0.0, 10.0, 20.0}, {50.0, 40.0, 30.0}};
    Rng rng(seed);
    std::vector<double> field;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int br = r / 4;
            const int bc = c / 4;
            scenario.true_labels.push_back(br * 3 + bc);
            field.push_back(block_mean[br][bc] + 0.05 * rng.normal());
        }
    scenario.features = make_feature_table(scenario.geometries, {{"planted_level", field}});
    return scenario;
}

// ---------------------------------------------------------------------------
// Country-scale scenario
// ---------------------------------------------------------------------------

struct CountryScenario {
    std::vector<RegionGeometry> geometries;
    std::vector<HouseholdRecord> households;
};

/// A country-like scenario: Voronoi provinces with a spatially smooth
/// latent poverty level driving household education, income, savings,
/// debt, and habits. Produces the geometry plus a household file that the
/// ingestion pipeline aggregates to the nine poverty factors.
inline CountryScenario country_scenario(std::size_t n_provinces = 77,
                                        int households_per_province = 40,
                                        std::uint64_t seed = 0) {
    require(n_provinces >= 8, "need at least 8 provinces");
    require(households_per_province >= 10, "need at least 10 households per province");
    CountryScenario scenario;
    scenario.geometries = voronoi_geometries(n_provinces, derive_seed(seed, 1));

    // Smooth latent poverty level in [0, 1].
    const SpatialWeights w = SpatialWeights::knn(scenario.geometries, 5);
    std::vector<double> latent = autocorrelated_field(w, 0.9, derive_seed(seed, 2));
    const std::vector<double> lagged = w.lag(latent);
    for (std::size_t i = 0; i < latent.size(); ++i)
        latent[i] += 0.9 * lagged[i]; // second smoothing pass
    const double lo = *std::min_element(latent.begin(), latent.end());
    const double hi = *std::max_element(latent.begin(), latent.end());
    std::vector<double> poverty(latent.size());
    for (std::size_t i = 0; i < latent.size(); ++i)
        poverty[i] = hi > lo ? (latent[i] - lo) / (hi - lo) : 0.5;

    const EducationGrade grades[kEducationGradeCount] = {
        EducationGrade::Uneducated,    EducationGrade::Kindergarten,
        EducationGrade::PreElementary, EducationGrade::Elementary,
        EducationGrade::JuniorHigh,    EducationGrade::SeniorHigh,
        EducationGrade::Vocational,    EducationGrade::Bachelor,
        EducationGrade::PostGraduate};

    Rng rng(derive_seed(seed, 3));
    for (std::size_t i = 0; i < scenario.geometries.size(); ++i) {
        const double p = poverty[i];
        for (int h = 0; h < households_per_province; ++h) {
            HouseholdRecord record;
            record.province = scenario.geometries[i].id.id;

            // Education: pick the grade whose years are closest to a
            // noisy target that drops with poverty.
            const double target = 15.0 - 7.0 * p + 2.5 * rng.normal();
            const EducationGrade* best = &grades[0];
            for (const EducationGrade& g : grades)
                if (std::abs(education_years(g) - target) <
                    std::abs(education_years(*best) - target))
                    best = &g;
            record.education_grade = *best;

            const double years = static_cast<double>(education_years(record.education_grade));
            const double log_income =
                std::log(6000.0 + 22000.0 * (1.0 - p)) + 0.04 * (years - 10.0) +
                0.35 * rng.normal();
            record.monthly_income = std::exp(log_income);

            record.has_savings = rng.uniform() < 0.85 - 0.55 * p;
            record.yearly_savings =
                record.has_savings
                    ? std::exp(std::log(2000.0 + 18000.0 * (1.0 - p)) + 0.6 * rng.normal())
                    : 0.0;
            record.formal_debt = rng.uniform() < 0.20 + 0.45 * p;
            record.alcohol = rng.uniform() < 0.15 + 0.30 * p;
            record.smoking = rng.uniform() < 0.15 + 0.35 * p;
            scenario.households.push_back(record);
        }
    }
    return scenario;
}

} // namespace regionlab
