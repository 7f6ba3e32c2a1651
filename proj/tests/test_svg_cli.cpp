#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <regionlab/esda.hpp>
#include <regionlab/geojson.hpp>
#include <regionlab/pca.hpp>
#include <regionlab/plots.hpp>
#include <regionlab/regionalize.hpp>
#include <regionlab/synth.hpp>
#include <regionlab/weights.hpp>

#include "helpers.hpp"

using namespace regionlab;
namespace fs = std::filesystem;

namespace {

void require_well_formed(const std::string& svg) {
    std::string why;
    INFO(why);
    REQUIRE(testutil::well_formed_xml(svg, &why));
    REQUIRE(svg.rfind("<?xml", 0) == 0);
    REQUIRE(svg.find("<svg") != std::string::npos);
    REQUIRE(svg.find("nan") == std::string::npos);
    REQUIRE(svg.find("inf") == std::string::npos);
}

struct CliRun {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the command-line binary with the given arguments, capturing exit
/// code, stdout, and stderr.
CliRun run_cli(const std::string& args, const fs::path& scratch) {
    fs::create_directories(scratch);
    const fs::path out_file = scratch / "stdout.txt";
    const fs::path err_file = scratch / "stderr.txt";
    const std::string command = std::string("\"") + REGIONLAB_CLI_PATH + "\" " + args + " > \"" +
                                out_file.string() + "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(command.c_str());
    CliRun run;
    if (WIFEXITED(status))
        run.exit_code = WEXITSTATUS(status);
    run.out = testutil::read_file(out_file.string());
    run.err = testutil::read_file(err_file.string());
    return run;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("regionlab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("every figure produced by the plotting layer is well-formed XML") {
    const PlantedScenario scenario = planted_blocks_scenario(1);
    const SpatialWeights w = SpatialWeights::knn(scenario.geometries, 5);
    const std::vector<double> values = scenario.features.column_values(0);

    SECTION("value choropleth") {
        require_well_formed(value_choropleth_svg(scenario.geometries, values, "planted level"));
    }
    SECTION("value choropleth with a constant attribute") {
        require_well_formed(value_choropleth_svg(
            scenario.geometries, std::vector<double>(values.size(), 2.0), "flat"));
    }
    SECTION("cluster map") {
        const LocalMoranResult local = local_moran(w, values, 199, 0.05, 4);
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < values.size(); ++i)
            labels.push_back(local.cluster_label(i));
        require_well_formed(cluster_map_svg(scenario.geometries, labels, "clusters"));
    }
    SECTION("Moran scatter and permutation histogram") {
        require_well_formed(moran_scatter_svg(moran_plot(w, values), "scatter"));
        require_well_formed(permutation_hist_svg(global_moran(w, values, 199, 5), "histogram"));
    }
    SECTION("region map, coherence sweep, radar, and biplot") {
        const Eigen::MatrixXd z = standardize(scenario.features);
        const RegionAssignment assignment =
            constrained_ward(z, w.symmetric_adjacency(), 6);
        require_well_formed(
            region_map_svg(scenario.geometries, assignment.labels, 6, "regions"));

        const CoherenceScores scores =
            sweep_regions(scenario.features, w, scenario.geometries, 2, 9);
        require_well_formed(coherence_svg(scores));

        const FeatureTable wide = testutil::random_features(scenario.geometries, 4, 9);
        const RegionProfile profile = region_profile(wide, assignment.labels, 6);
        for (std::size_t r = 0; r < 6; ++r)
            require_well_formed(radar_svg(profile, r, "profile"));

        const PcaResult result = pca(standardize(wide));
        Eigen::MatrixXd region_means = Eigen::MatrixXd::Zero(6, 2);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(6);
        for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
            region_means.row(assignment.labels[i]) +=
                result.scores.row(static_cast<Eigen::Index>(i)).head(2);
            counts(assignment.labels[i]) += 1.0;
        }
        for (int r = 0; r < 6; ++r)
            region_means.row(r) /= counts(r);
        std::vector<std::string> names;
        for (const Factor& f : wide.factors)
            names.push_back(f.name);
        require_well_formed(biplot_svg(result, names, region_means));
    }
    SECTION("forest plot and fitted lines") {
        std::vector<std::string> names{"alpha[1]", "alpha[2]", "beta"};
        std::vector<CredibleInterval> intervals;
        for (double center : {2000.0, 3500.0, 250.0}) {
            CredibleInterval ci;
            ci.low = center - 100.0;
            ci.mean = center;
            ci.high = center + 100.0;
            intervals.push_back(ci);
        }
        require_well_formed(forest_svg(names, intervals, "posterior intervals"));

        RegressionTruth truth;
        truth.alpha = {2000.0, 3500.0};
        truth.beta = {250.0};
        truth.sigma = {100.0, 100.0};
        const RegressionData data = hierarchical_income_data(2, 8, truth, 10);
        require_well_formed(
            fitted_lines_svg(data, {2000.0, 3500.0}, {250.0, 250.0}, "fits"));
    }
}

TEST_CASE("the command line generates scenario inputs") {
    const fs::path dir = scratch_dir("synth");
    const CliRun planted =
        run_cli("synth --scenario planted --seed 4 --out \"" + (dir / "planted").string() + "\"",
                dir);
    CAPTURE(planted.err);
    REQUIRE(planted.exit_code == 0);
    REQUIRE(fs::file_size(dir / "planted" / "geometry.geojson") > 0);
    REQUIRE(fs::file_size(dir / "planted" / "attributes.csv") > 0);

    const CliRun country = run_cli(
        "synth --scenario country --provinces 20 --households-per-province 12 --seed 4 --out \"" +
            (dir / "country").string() + "\"",
        dir);
    CAPTURE(country.err);
    REQUIRE(country.exit_code == 0);
    REQUIRE(fs::file_size(dir / "country" / "geometry.geojson") > 0);
    REQUIRE(fs::file_size(dir / "country" / "households.csv") > 0);

    const CliRun unknown = run_cli("synth --scenario fancy --out \"" + dir.string() + "\"", dir);
    REQUIRE(unknown.exit_code != 0);
    REQUIRE(unknown.err.find("fancy") != std::string::npos);
}

TEST_CASE("a single analysis stage runs end to end from the command line") {
    const fs::path dir = scratch_dir("stage");
    REQUIRE(run_cli("synth --scenario planted --seed 4 --out \"" + (dir / "in").string() + "\"",
                    dir)
                .exit_code == 0);
    const std::string data_args = " --geometry \"" + (dir / "in" / "geometry.geojson").string() +
                                  "\" --attributes \"" + (dir / "in" / "attributes.csv").string() +
                                  "\"";
    const CliRun jenks = run_cli("jenks" + data_args + " --classes 4 --out \"" +
                                     (dir / "out").string() + "\"",
                                 dir);
    CAPTURE(jenks.err);
    REQUIRE(jenks.exit_code == 0);
    REQUIRE(fs::file_size(dir / "out" / "jenks.csv") > 0);
    const std::string svg = testutil::read_file((dir / "out" / "jenks_map.svg").string());
    std::string why;
    INFO(why);
    REQUIRE(testutil::well_formed_xml(svg, &why));
}

TEST_CASE("a constant attribute fails loudly naming the flat column") {
    const fs::path dir = scratch_dir("flat");
    const auto geoms = grid_geometries(4, 4);
    write_geojson((dir / "geometry.geojson").string(), geoms);
    std::ofstream csv(dir / "attributes.csv");
    csv << "province_id,flat_level\n";
    for (const auto& g : geoms)
        csv << g.id.id << ",7.5\n";
    csv.close();

    const CliRun run = run_cli("moran --geometry \"" + (dir / "geometry.geojson").string() +
                                   "\" --attributes \"" + (dir / "attributes.csv").string() +
                                   "\" --out \"" + (dir / "out").string() + "\"",
                               dir);
    REQUIRE(run.exit_code != 0);
    REQUIRE(run.err.find("flat_level") != std::string::npos);
}

TEST_CASE("bad invocations exit nonzero with usage errors") {
    const fs::path dir = scratch_dir("usage");
    REQUIRE(run_cli("", dir).exit_code != 0);
    REQUIRE(run_cli("--frobnicate", dir).exit_code != 0);
    const CliRun missing = run_cli("moran --out x", dir);
    REQUIRE(missing.exit_code != 0);
    REQUIRE(missing.err.find("--geometry") != std::string::npos);
}
