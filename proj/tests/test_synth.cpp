#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <regionlab/geometry.hpp>
#include <regionlab/ingest.hpp>
#include <regionlab/stats.hpp>
#include <regionlab/synth.hpp>
#include <regionlab/weights.hpp>

#include "helpers.hpp"

using namespace regionlab;

TEST_CASE("generated ids are zero-padded to the population width") {
    REQUIRE(detail::padded_id('v', 0, 77) == "v01");
    REQUIRE(detail::padded_id('v', 76, 77) == "v77");
    REQUIRE(detail::padded_id('c', 95, 96) == "c96");
    REQUIRE(detail::padded_id('p', 7, 1000) == "p0008");
    REQUIRE(detail::padded_id('p', 4, 9) == "p5");
}

TEST_CASE("grid cells are unit squares laid out row-major") {
    const auto cells = grid_geometries(3, 4);
    REQUIRE(cells.size() == 12);
    REQUIRE(cells[0].id.id == "c01");
    REQUIRE(cells[11].id.id == "c12");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        REQUIRE(cells[i].area == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(cells[i].perimeter == Catch::Approx(4.0).margin(1e-12));
        const double cx = static_cast<double>(i % 4) + 0.5;
        const double cy = static_cast<double>(i / 4) + 0.5;
        REQUIRE(cells[i].centroid.x == Catch::Approx(cx).margin(1e-12));
        REQUIRE(cells[i].centroid.y == Catch::Approx(cy).margin(1e-12));
    }
    REQUIRE_THROWS(grid_geometries(0, 4));
}

TEST_CASE("torus adjacency gives every cell four mutual neighbors") {
    const auto neighbors = torus_rook_neighbors(4, 5);
    REQUIRE(neighbors.size() == 20);
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        std::vector<std::size_t> sorted = neighbors[i];
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        REQUIRE(sorted.size() == 4);
        for (std::size_t j : neighbors[i]) {
            REQUIRE(std::count(neighbors[j].begin(), neighbors[j].end(), i) == 1);
        }
    }
    // Wraparound: the bottom-left cell touches the top row and right column.
    REQUIRE(std::count(neighbors[0].begin(), neighbors[0].end(), 15) == 1);
    REQUIRE(std::count(neighbors[0].begin(), neighbors[0].end(), 4) == 1);
    REQUIRE_THROWS(torus_rook_neighbors(2, 5));
}

TEST_CASE("checkerboard values alternate along rows and columns") {
    const auto field = checkerboard_field(6, 6);
    REQUIRE(std::accumulate(field.begin(), field.end(), 0.0) == 0.0);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            const double v = field[static_cast<std::size_t>(r * 6 + c)];
            REQUIRE(std::abs(v) == 1.0);
            if (c + 1 < 6)
                REQUIRE(field[static_cast<std::size_t>(r * 6 + c + 1)] == -v);
            if (r + 1 < 6)
                REQUIRE(field[static_cast<std::size_t>((r + 1) * 6 + c)] == -v);
        }
}

TEST_CASE("Voronoi cells tile the box exactly") {
    const double extent = 10.0;
    const auto cells = voronoi_geometries(25, 4, extent);
    REQUIRE(cells.size() == 25);
    REQUIRE(cells[0].id.id == "v01");
    REQUIRE(cells[24].id.id == "v25");
    double total = 0.0;
    for (const auto& cell : cells) {
        REQUIRE(cell.area > 0.0);
        REQUIRE(cell.perimeter > 0.0);
        REQUIRE(cell.centroid.x >= 0.0);
        REQUIRE(cell.centroid.x <= extent);
        REQUIRE(cell.centroid.y >= 0.0);
        REQUIRE(cell.centroid.y <= extent);
        total += cell.area;
    }
    REQUIRE(total == Catch::Approx(extent * extent).margin(1e-6));
    REQUIRE_THROWS(voronoi_geometries(2, 4));
}

TEST_CASE("Voronoi layouts are reproducible per seed") {
    const auto a = voronoi_geometries(12, 99);
    const auto b = voronoi_geometries(12, 99);
    const auto c = voronoi_geometries(12, 100);
    REQUIRE(a.size() == b.size());
    bool identical_ab = true, identical_ac = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].centroid.x != b[i].centroid.x || a[i].centroid.y != b[i].centroid.y)
            identical_ab = false;
        if (a[i].centroid.x != c[i].centroid.x)
            identical_ac = false;
    }
    REQUIRE(identical_ab);
    REQUIRE_FALSE(identical_ac);
}

TEST_CASE("the autocorrelated field is noise plus rho times its lag") {
    const auto geoms = voronoi_geometries(30, 8);
    const SpatialWeights w = SpatialWeights::knn(geoms, 5);
    const double rho = 0.7;
    const std::vector<double> field = autocorrelated_field(w, rho, 123);

    // Reconstruct: the generator draws one normal per cell from Rng(seed)
    // then adds rho times the spatial lag of that noise.
    Rng rng(123);
    std::vector<double> noise(w.size());
    for (double& v : noise)
        v = rng.normal();
    const std::vector<double> lagged = testutil::dense_lag(w, noise);
    for (std::size_t i = 0; i < noise.size(); ++i)
        REQUIRE(field[i] == Catch::Approx(noise[i] + rho * lagged[i]).margin(1e-12));

    REQUIRE_THROWS(autocorrelated_field(w, 1.0, 1));
    REQUIRE_THROWS(autocorrelated_field(w, -1.5, 1));
}

TEST_CASE("feature tables built from columns preserve metadata") {
    const auto geoms = grid_geometries(2, 3);
    std::vector<double> a{1, 2, 3, 4, 5, 6};
    std::vector<double> b{6, 5, 4, 3, 2, 1};
    const FeatureTable table =
        make_feature_table(geoms, {{"monthly_income", a}, {"custom_score", b}});
    REQUIRE(table.factors[0].aspect == FactorAspect::Income);
    REQUIRE(table.factors[0].polarity == 1);
    REQUIRE(table.factors[1].aspect == FactorAspect::Other);
    REQUIRE(table.column_values(0) == a);
    REQUIRE(table.column_values(1) == b);
    REQUIRE_THROWS_WITH(make_feature_table(geoms, {{"short", {1.0, 2.0}}}),
                        Catch::Matchers::ContainsSubstring("short"));
}

TEST_CASE("planted blocks carry their design means") {
    const PlantedScenario scenario = planted_blocks_scenario(7);
    REQUIRE(scenario.geometries.size() == 96);
    REQUIRE(scenario.true_labels.size() == 96);
    REQUIRE(scenario.features.factors.size() == 1);
    REQUIRE(scenario.features.factors[0].name == "planted_level");

    const double block_mean[6] = {0.0, 10.0, 20.0, 50.0, 40.0, 30.0};
    const std::vector<double> values = scenario.features.column_values(0);
    for (std::size_t i = 0; i < 96; ++i) {
        const int r = static_cast<int>(i) / 12;
        const int c = static_cast<int>(i) % 12;
        const int label = (r / 4) * 3 + c / 4;
        REQUIRE(scenario.true_labels[i] == label);
        REQUIRE(values[i] == Catch::Approx(block_mean[label]).margin(0.5));
    }
    // Reproducible per seed.
    const PlantedScenario again = planted_blocks_scenario(7);
    REQUIRE(again.features.column_values(0) == values);
}

TEST_CASE("regression data generator centers on the true intercepts") {
    RegressionTruth truth;
    truth.alpha = {1000.0, 2500.0, 4000.0};
    truth.beta = {300.0};
    truth.sigma = {50.0, 50.0, 50.0};
    const RegressionData data = hierarchical_income_data(3, 400, truth, 55);
    REQUIRE(data.x.size() == 1200);
    for (double v : data.x) {
        REQUIRE(v >= 8.0);
        REQUIRE(v <= 14.0);
    }
    // With education centered, alpha_j is the regional location; the Laplace
    // location is the median, so regional medians of the detrended response
    // estimate alpha_j directly.
    for (int j = 0; j < 3; ++j) {
        std::vector<double> detrended;
        for (std::size_t i : data.members[static_cast<std::size_t>(j)])
            detrended.push_back(data.y[i] - 300.0 * data.x_centered[i]);
        REQUIRE(median(detrended) ==
                Catch::Approx(truth.alpha[static_cast<std::size_t>(j)]).margin(15.0));
    }
    REQUIRE_THROWS(hierarchical_income_data(2, 1, truth, 1));
}

TEST_CASE("the country scenario produces a coherent household survey") {
    const CountryScenario scenario = country_scenario(77, 40, 3);
    REQUIRE(scenario.geometries.size() == 77);
    REQUIRE(scenario.households.size() == 77u * 40u);

    for (const HouseholdRecord& hh : scenario.households) {
        REQUIRE(std::isfinite(hh.monthly_income));
        REQUIRE(hh.monthly_income > 0.0);
        if (hh.has_savings)
            REQUIRE(hh.yearly_savings > 0.0);
        else
            REQUIRE(hh.yearly_savings == 0.0);
    }

    // Aggregation to the nine poverty factors succeeds and validates.
    std::vector<ProvinceId> provinces;
    for (const auto& g : scenario.geometries)
        provinces.push_back(g.id);
    const FeatureTable table = aggregate_households(scenario.households, provinces);
    REQUIRE(table.factors.size() == 9);
    validate(table);

    // Income and education move together across provinces: poorer places
    // get both less schooling and less income by construction.
    const std::vector<double> edu = table.column_values(table.column("years_of_education"));
    const std::vector<double> income = table.column_values(table.column("monthly_income"));
    const double edu_mean = mean(edu);
    const double income_mean = mean(income);
    double cov = 0.0;
    for (std::size_t i = 0; i < edu.size(); ++i)
        cov += (edu[i] - edu_mean) * (income[i] - income_mean);
    REQUIRE(cov > 0.0);
}

TEST_CASE("the country scenario is reproducible per seed") {
    const CountryScenario a = country_scenario(20, 12, 5);
    const CountryScenario b = country_scenario(20, 12, 5);
    const CountryScenario c = country_scenario(20, 12, 6);
    REQUIRE(a.households.size() == b.households.size());
    bool identical = true;
    for (std::size_t i = 0; i < a.households.size(); ++i)
        if (a.households[i].monthly_income != b.households[i].monthly_income)
            identical = false;
    REQUIRE(identical);
    bool differs = false;
    for (std::size_t i = 0; i < a.households.size(); ++i)
        if (a.households[i].monthly_income != c.households[i].monthly_income)
            differs = true;
    REQUIRE(differs);
    REQUIRE_THROWS(country_scenario(5, 40, 1));
    REQUIRE_THROWS(country_scenario(20, 5, 1));
}
