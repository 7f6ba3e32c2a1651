#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <regionlab/csv.hpp>
#include <regionlab/geojson.hpp>
#include <regionlab/pipeline.hpp>
#include <regionlab/synth.hpp>

#include "helpers.hpp"

using namespace regionlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("regionlab_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Writes a small country scenario to disk and returns a configuration
/// pointing at it.
PipelineConfig country_config(const fs::path& dir, std::uint64_t seed) {
    const CountryScenario scenario = country_scenario(30, 12, seed);
    write_geojson((dir / "geometry.geojson").string(), scenario.geometries);
    write_household_csv((dir / "households.csv").string(), scenario.households);
    PipelineConfig config;
    config.geometry_path = (dir / "geometry.geojson").string();
    config.households_path = (dir / "households.csv").string();
    config.n_perm = 199;
    config.regions = 5;
    config.region_lo = 2;
    config.region_hi = 8;
    config.seed = seed;
    return config;
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file())
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

TEST_CASE("the full pipeline writes every advertised artifact") {
    const fs::path dir = fresh_dir("artifacts");
    PipelineConfig config = country_config(dir, 4);
    config.out_dir = (dir / "out").string();
    run_pipeline(config);

    const std::vector<std::string> expected = {
        "weights.json",        "moran.json",
        "moran_scatter.svg",   "moran_permutations.svg",
        "localmoran.json",     "cluster_map.svg",
        "jenks.csv",           "jenks_map.svg",
        "coherence.json",      "coherence.svg",
        "regions.csv",         "region_map.svg",
        "pca.json",            "biplot.svg",
        "waic.json",           "bayes_intervals.json",
        "bayes_draws.csv",     "forest.svg",
        "fitted_lines.svg",    "gwr.csv",
        "gwr.json",            "gwr_fitted_map.svg",
        "gwr_slope_map.svg",   "gwr_residual_map.svg",
        "gwr_residual_lag_map.svg"};
    for (const std::string& name : expected) {
        CAPTURE(name);
        REQUIRE(fs::exists(fs::path(config.out_dir) / name));
        REQUIRE(fs::file_size(fs::path(config.out_dir) / name) > 0);
    }
    for (int r = 1; r <= config.regions; ++r) {
        const fs::path radar =
            fs::path(config.out_dir) / ("radar_region_" + std::to_string(r) + ".svg");
        CAPTURE(radar.string());
        REQUIRE(fs::exists(radar));
    }

    // Every SVG artifact parses as XML.
    for (const fs::path& file : sorted_files(config.out_dir)) {
        if (file.extension() != ".svg")
            continue;
        std::string why;
        CAPTURE(file.string(), why);
        REQUIRE(testutil::well_formed_xml(testutil::read_file(file.string()), &why));
    }

    // The region partition is readable and matches the configured count.
    const CsvTable regions = read_csv((fs::path(config.out_dir) / "regions.csv").string());
    REQUIRE(regions.rows.size() == 30);
    std::vector<int> seen;
    for (const auto& row : regions.rows)
        seen.push_back(std::stoi(row[regions.column("region")]));
    REQUIRE(*std::max_element(seen.begin(), seen.end()) == config.regions);
    REQUIRE(*std::min_element(seen.begin(), seen.end()) == 1);

    // The model comparison covers all four variants and names a winner.
    const json waic = read_json((fs::path(config.out_dir) / "waic.json").string());
    REQUIRE(waic.at("variants").size() == 4);
    REQUIRE(waic.at("variants").contains(waic.at("best").get<std::string>()));
}

TEST_CASE("pipeline outputs are byte-identical across reruns") {
    const fs::path dir = fresh_dir("determinism");
    PipelineConfig config = country_config(dir, 13);
    config.out_dir = (dir / "a").string();
    run_pipeline(config);
    config.out_dir = (dir / "b").string();
    run_pipeline(config);

    const std::vector<fs::path> a = sorted_files(dir / "a");
    const std::vector<fs::path> b = sorted_files(dir / "b");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CAPTURE(a[i].string());
        REQUIRE(a[i].filename() == b[i].filename());
        REQUIRE(testutil::read_file(a[i].string()) == testutil::read_file(b[i].string()));
    }
    REQUIRE(a.size() >= 25);
}

TEST_CASE("a different seed changes the permutation outputs") {
    const fs::path dir = fresh_dir("seeds");
    PipelineConfig config = country_config(dir, 17);
    config.out_dir = (dir / "a").string();
    PipelineContext ctx_a(config);
    run_moran_stage(ctx_a);
    config.seed = 18; // same inputs on disk, different analysis seed
    config.out_dir = (dir / "b").string();
    PipelineContext ctx_b(config);
    run_moran_stage(ctx_b);

    const json a = read_json((dir / "a" / "moran.json").string());
    const json b = read_json((dir / "b" / "moran.json").string());
    REQUIRE(a.at("observed") == b.at("observed")); // statistic is seed-free
    REQUIRE(a.at("perm_mean") != b.at("perm_mean"));
}

TEST_CASE("failures name the stage that raised them") {
    const fs::path dir = fresh_dir("errors");

    SECTION("missing geometry file") {
        PipelineConfig config;
        config.geometry_path = (dir / "nope.geojson").string();
        config.attributes_path = (dir / "nope.csv").string();
        REQUIRE_THROWS_WITH(PipelineContext(config),
                            Catch::Matchers::ContainsSubstring("stage ingest:"));
    }
    SECTION("both attribute and household inputs") {
        PipelineConfig config = country_config(dir, 19);
        config.attributes_path = config.households_path;
        REQUIRE_THROWS_WITH(PipelineContext(config),
                            Catch::Matchers::ContainsSubstring("not both"));
    }
    SECTION("constant attribute column is reported by name") {
        const auto geoms = grid_geometries(4, 4);
        write_geojson((dir / "flat_geometry.geojson").string(), geoms);
        std::ofstream csv(dir / "flat.csv");
        csv << "province_id,flat_level\n";
        for (const auto& g : geoms)
            csv << g.id.id << ",3.25\n";
        csv.close();
        PipelineConfig config;
        config.geometry_path = (dir / "flat_geometry.geojson").string();
        config.attributes_path = (dir / "flat.csv").string();
        config.out_dir = (dir / "out").string();
        PipelineContext ctx(config);
        REQUIRE_THROWS_WITH(run_moran_stage(ctx),
                            Catch::Matchers::ContainsSubstring("stage moran:") &&
                                Catch::Matchers::ContainsSubstring("flat_level"));
    }
    SECTION("sweep range too wide for the map") {
        PipelineConfig config = country_config(dir, 23);
        config.out_dir = (dir / "sweep").string();
        config.region_hi = 40;
        PipelineContext ctx(config);
        REQUIRE_THROWS_WITH(run_regionalize_stage(ctx),
                            Catch::Matchers::ContainsSubstring("stage regionalize:"));
    }
    SECTION("bad configuration values are rejected up front") {
        PipelineConfig config = country_config(dir, 29);
        config.alpha = 1.5;
        REQUIRE_THROWS_WITH(PipelineContext(config),
                            Catch::Matchers::ContainsSubstring("alpha"));
    }
}
