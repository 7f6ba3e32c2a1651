// Command-line front end: one subcommand per analysis stage plus a full
// pipeline runner and a synthetic-scenario generator.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <regionlab/pipeline.hpp>
#include <regionlab/synth.hpp>

namespace {

void parse_region_range(const std::string& text, int& lo, int& hi) {
    const std::size_t dots = text.find("..");
    regionlab::require(dots != std::string::npos, "region range must look like LO..HI, got '",
                       text, "'");
    try {
        lo = std::stoi(text.substr(0, dots));
        hi = std::stoi(text.substr(dots + 2));
    } catch (const std::exception&) {
        regionlab::fail("region range must look like LO..HI, got '", text, "'");
    }
}

void run_synth(const std::string& scenario, int provinces, int households_per_province,
               std::uint64_t seed, const std::string& out) {
    const std::filesystem::path out_dir(out);
    std::filesystem::create_directories(out_dir);
    if (scenario == "country") {
        const regionlab::CountryScenario data =
            regionlab::country_scenario(provinces, households_per_province, seed);
        regionlab::write_geojson((out_dir / "geometry.geojson").string(), data.geometries);
        regionlab::write_household_csv((out_dir / "households.csv").string(), data.households);
    } else if (scenario == "planted") {
        const regionlab::PlantedScenario data = regionlab::planted_blocks_scenario(seed);
        regionlab::write_geojson((out_dir / "geometry.geojson").string(), data.geometries);
        regionlab::write_feature_csv((out_dir / "attributes.csv").string(), data.features);
    } else {
        regionlab::fail("unknown scenario '", scenario, "' (expected country or planted)");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regionlab: spatial analysis of province-level poverty factors"};
    app.require_subcommand(1);

    regionlab::PipelineConfig config;
    std::string region_range = "2..9";

    const auto add_data_options = [&](CLI::App* cmd) {
        cmd->add_option("--geometry", config.geometry_path, "GeoJSON polygon file")->required();
        cmd->add_option("--attributes", config.attributes_path,
                        "province-level attribute CSV (province_id + factor columns)");
        cmd->add_option("--households", config.households_path,
                        "household-level CSV, aggregated to province factors on load");
        cmd->add_option("--k", config.k, "neighbors per province in the kNN weights")
            ->capture_default_str();
        cmd->add_option("--n-perm", config.n_perm, "permutations for pseudo p-values")
            ->capture_default_str();
        cmd->add_option("--alpha", config.alpha, "significance level")->capture_default_str();
        cmd->add_option("--classes", config.classes, "natural-breaks class count")
            ->capture_default_str();
        cmd->add_option("--regions", config.regions, "region count for the final partition")
            ->capture_default_str();
        cmd->add_option("--region-range", region_range, "region counts to sweep, as LO..HI")
            ->capture_default_str();
        cmd->add_option("--variant", config.variant,
                        "regression variant: diff-slopes|common-slope|independent|pooled|all")
            ->capture_default_str();
        cmd->add_option("--seed", config.seed, "random seed")->capture_default_str();
        cmd->add_option("--out", config.out_dir, "output directory")->capture_default_str();
    };

    const auto add_stage = [&](const std::string& name, const std::string& help,
                               void (*stage)(regionlab::PipelineContext&)) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_data_options(cmd);
        cmd->callback([&, stage] {
            parse_region_range(region_range, config.region_lo, config.region_hi);
            regionlab::PipelineContext ctx(config);
            stage(ctx);
        });
        return cmd;
    };

    add_stage("weights", "build kNN spatial weights and write weights.json",
              &regionlab::run_weights_stage);
    add_stage("moran", "global spatial autocorrelation with permutation inference",
              &regionlab::run_moran_stage);
    add_stage("localmoran", "per-province cluster analysis with conditional permutations",
              &regionlab::run_localmoran_stage);
    add_stage("jenks", "natural-breaks classification and choropleth",
              &regionlab::run_jenks_stage);
    add_stage("regionalize", "spatially constrained clustering and region-count sweep",
              &regionlab::run_regionalize_stage);
    add_stage("pca", "principal components, biplot and per-region factor profiles",
              &regionlab::run_pca_stage);
    add_stage("bayes", "hierarchical income-on-education regression with model comparison",
              &regionlab::run_bayes_stage);
    add_stage("gwr", "geographically weighted regression with residual diagnostics",
              &regionlab::run_gwr_stage);

    {
        CLI::App* cmd = app.add_subcommand("pipeline", "run every stage in order");
        add_data_options(cmd);
        cmd->callback([&] {
            parse_region_range(region_range, config.region_lo, config.region_hi);
            regionlab::run_pipeline(config);
        });
    }

    std::string scenario = "country";
    int synth_provinces = 77;
    int synth_households = 40;
    std::uint64_t synth_seed = 0;
    std::string synth_out = ".";
    {
        CLI::App* cmd = app.add_subcommand("synth", "generate a synthetic scenario");
        cmd->add_option("--scenario", scenario, "country (geometry + households) or planted")
            ->capture_default_str();
        cmd->add_option("--provinces", synth_provinces, "province count (country scenario)")
            ->capture_default_str();
        cmd->add_option("--households-per-province", synth_households,
                        "household count per province (country scenario)")
            ->capture_default_str();
        cmd->add_option("--seed", synth_seed, "random seed")->capture_default_str();
        cmd->add_option("--out", synth_out, "output directory")->capture_default_str();
        cmd->callback(
            [&] { run_synth(scenario, synth_provinces, synth_households, synth_seed, synth_out); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
