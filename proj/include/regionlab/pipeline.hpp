#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "regionlab/bayes.hpp"
#include "regionlab/classify.hpp"
#include "regionlab/esda.hpp"
#include "regionlab/geojson.hpp"
#include "regionlab/geometry.hpp"
#include "regionlab/gwr.hpp"
#include "regionlab/ingest.hpp"
#include "regionlab/jsonio.hpp"
#include "regionlab/pca.hpp"
#include "regionlab/plots.hpp"
#include "regionlab/regionalize.hpp"
#include "regionlab/weights.hpp"

namespace regionlab {

struct PipelineConfig {
    std::string geometry_path;
    std::string attributes_path;  // province-level CSV
    std::string households_path;  // household-level CSV (aggregated on load)
    int k = 5;
    int n_perm = 999;
    double alpha = 0.05;
    int classes = 5;
    int regions = 6;
    int region_lo = 2;
    int region_hi = 9;
    std::string variant = "all"; // model variant or "all"
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

struct PipelineInputs {
    std::vector<RegionGeometry> geometries;
    FeatureTable features;
};

namespace detail {

template <typename F> void stage(const char* name, F&& body) {
    try {
        std::forward<F>(body)();
    } catch (const std::exception& e) {
        fail("stage ", name, ": ", e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open '", path.string(), "' for writing");
    out << content;
}

} // namespace detail

/// Loads geometry plus either a province-level attribute table or a
/// household file (aggregated to the nine poverty factors), with the
/// attribute rows aligned to the geometry order.
inline PipelineInputs load_inputs(const PipelineConfig& config) {
    PipelineInputs inputs;
    detail::stage("ingest", [&] {
        require(!config.geometry_path.empty(), "no geometry file given");
        inputs.geometries = load_geometry(config.geometry_path);
        require(config.attributes_path.empty() || config.households_path.empty(),
                "give either an attribute table or a household file, not both");
        if (!config.households_path.empty()) {
            const auto households = load_household_csv(config.households_path);
            std::vector<ProvinceId> provinces;
            for (const RegionGeometry& g : inputs.geometries)
                provinces.push_back(g.id);
            inputs.features = aggregate_households(households, provinces);
        } else {
            require(!config.attributes_path.empty(), "no attribute or household file given");
            inputs.features = align_to_geometry(load_feature_csv(config.attributes_path),
                                                inputs.geometries);
        }
        validate(inputs.features);
    });
    return inputs;
}

/// The attribute the single-variable stages analyze: monthly income when
/// present, otherwise the first factor column.
inline std::size_t primary_column(const FeatureTable& features) {
    for (std::size_t j = 0; j < features.factors.size(); ++j)
        if (features.factors[j].name == "monthly_income")
            return j;
    return 0;
}

/// Shared state for the analysis stages. Single-stage entry points build
/// only what they need; the full pipeline reuses one context end to end.
struct PipelineContext {
    PipelineConfig config;
    std::filesystem::path out_dir;
    PipelineInputs inputs;
    SpatialWeights weights;
    std::size_t primary = 0;
    RegionAssignment assignment;
    bool has_assignment = false;

    explicit PipelineContext(PipelineConfig cfg) : config(std::move(cfg)), out_dir(config.out_dir) {
        require(config.k >= 1, "k must be positive");
        require(config.n_perm >= 1, "n-perm must be positive");
        require(config.alpha > 0.0 && config.alpha < 1.0, "alpha must lie in (0,1)");
        require(config.classes >= 1, "classes must be positive");
        require(config.region_lo >= 2 && config.region_hi >= config.region_lo,
                "invalid region range");
        require(config.regions >= 1, "regions must be positive");
        std::filesystem::create_directories(out_dir);
        inputs = load_inputs(config);
        detail::stage("weights",
                      [&] { weights = SpatialWeights::knn(inputs.geometries, config.k); });
        primary = primary_column(inputs.features);
    }

    const std::string& primary_name() const { return inputs.features.factors[primary].name; }
    std::vector<double> primary_values() const { return inputs.features.column_values(primary); }

    /// Region labels at the configured region count, computing them on demand
    /// so stages that need a partition can run standalone.
    const RegionAssignment& region_assignment() {
        if (!has_assignment) {
            detail::stage("regionalize", [&] {
                assignment = constrained_ward(standardize(inputs.features),
                                              weights.symmetric_adjacency(), config.regions);
            });
            has_assignment = true;
        }
        return assignment;
    }
};

// ---------------------------------------------------------------------------
// Serialization helpers
// ---------------------------------------------------------------------------

inline json moran_to_json(const MoranResult& result) {
    json obj;
    obj["observed"] = round12(result.observed);
    obj["expectation"] = round12(result.expectation);
    obj["p_value"] = round12(result.p_value);
    obj["perm_mean"] = round12(result.perm_mean);
    obj["perm_sd"] = round12(result.perm_sd);
    obj["n_perm"] = result.n_perm;
    obj["seed"] = result.seed;
    return obj;
}

inline json coherence_to_json(const CoherenceScores& scores) {
    json obj;
    json rows = json::array();
    for (const CandidateScore& c : scores.candidates) {
        json row;
        row["n_regions"] = c.n_regions;
        row["mean_ipq"] = round12(c.mean_ipq);
        row["silhouette"] = round12(c.silhouette);
        row["calinski_harabasz"] = round12(c.calinski_harabasz);
        row["norm_ipq"] = round12(c.norm_ipq);
        row["norm_silhouette"] = round12(c.norm_silhouette);
        row["norm_ch"] = round12(c.norm_ch);
        row["combined_silhouette"] = round12(c.combined_silhouette);
        row["combined_ch"] = round12(c.combined_ch);
        rows.push_back(std::move(row));
    }
    obj["candidates"] = std::move(rows);
    obj["best_by_silhouette"] = scores.best_by_silhouette;
    obj["best_by_ch"] = scores.best_by_ch;
    return obj;
}

inline void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open '", path.string(), "' for writing");
    out << "chain,draw";
    for (const std::string& name : draws.names)
        out << ',' << csv_quote(name);
    out << '\n';
    for (std::size_t c = 0; c < draws.chains.size(); ++c) {
        const Eigen::MatrixXd& chain = draws.chains[c];
        for (Eigen::Index r = 0; r < chain.rows(); ++r) {
            out << (c + 1) << ',' << (r + 1);
            for (Eigen::Index p = 0; p < chain.cols(); ++p)
                out << ',' << format12(chain(r, p));
            out << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Stages (each writes its own artifacts into the output directory)
// ---------------------------------------------------------------------------

inline void run_weights_stage(PipelineContext& ctx) {
    detail::stage("weights",
                  [&] { write_json(ctx.out_dir / "weights.json", ctx.weights.to_json()); });
}

inline void run_moran_stage(PipelineContext& ctx) {
    detail::stage("moran", [&] {
        const FeatureTable& features = ctx.inputs.features;
        // Attribute problems (e.g. a constant column) should name the column.
        const auto moran_of = [&](const std::vector<double>& vals, const std::string& name,
                                  std::uint64_t seed) -> MoranResult {
            try {
                return global_moran(ctx.weights, vals, ctx.config.n_perm, seed);
            } catch (const std::exception& e) {
                fail("column '", name, "': ", e.what());
            }
        };
        const std::vector<double> values = ctx.primary_values();
        const MoranResult result = moran_of(values, ctx.primary_name(), ctx.config.seed);
        json obj;
        obj["variable"] = ctx.primary_name();
        obj["n"] = ctx.weights.size();
        obj["k"] = ctx.config.k;
        obj["alpha"] = round12(ctx.config.alpha);
        obj["significant"] = result.p_value <= ctx.config.alpha;
        obj.update(moran_to_json(result));
        json factor_rows = json::array();
        for (std::size_t j = 0; j < features.factors.size(); ++j) {
            const MoranResult fr =
                moran_of(features.column_values(j), features.factors[j].name,
                         derive_seed(ctx.config.seed, 200 + j));
            json row;
            row["name"] = features.factors[j].name;
            row["observed"] = round12(fr.observed);
            row["p_value"] = round12(fr.p_value);
            factor_rows.push_back(std::move(row));
        }
        obj["factors"] = std::move(factor_rows);
        write_json(ctx.out_dir / "moran.json", obj);

        const MoranPlot plot = moran_plot(ctx.weights, values);
        detail::write_text(ctx.out_dir / "moran_scatter.svg",
                           moran_scatter_svg(plot, "Moran scatter: " + ctx.primary_name()));
        detail::write_text(ctx.out_dir / "moran_permutations.svg",
                           permutation_hist_svg(result, "Permutation distribution: " +
                                                            ctx.primary_name()));
    });
}

inline void run_localmoran_stage(PipelineContext& ctx) {
    detail::stage("localmoran", [&] {
        const FeatureTable& features = ctx.inputs.features;
        const LocalMoranResult result =
            local_moran(ctx.weights, ctx.primary_values(), ctx.config.n_perm, ctx.config.alpha,
                        derive_seed(ctx.config.seed, 300));
        json obj;
        obj["variable"] = ctx.primary_name();
        obj["alpha"] = round12(ctx.config.alpha);
        obj["n_perm"] = ctx.config.n_perm;
        json units = json::array();
        std::vector<std::string> cluster_labels;
        for (std::size_t i = 0; i < result.units.size(); ++i) {
            const LocalMoranUnit& unit = result.units[i];
            json row;
            row["id"] = features.provinces[i].id;
            row["local_i"] = round12(unit.value);
            row["expectation"] = round12(unit.expectation);
            row["p_value"] = round12(unit.p_value);
            row["quadrant"] = quadrant_label(unit.quadrant);
            row["cluster"] = result.cluster_label(i);
            units.push_back(std::move(row));
            cluster_labels.push_back(result.cluster_label(i));
        }
        obj["units"] = std::move(units);
        write_json(ctx.out_dir / "localmoran.json", obj);
        detail::write_text(ctx.out_dir / "cluster_map.svg",
                           cluster_map_svg(ctx.inputs.geometries, cluster_labels,
                                           "Moran clusters: " + ctx.primary_name()));
    });
}

inline void run_jenks_stage(PipelineContext& ctx) {
    detail::stage("jenks", [&] {
        const FeatureTable& features = ctx.inputs.features;
        const std::vector<double> values = ctx.primary_values();
        const Classification classes = fisher_jenks(values, ctx.config.classes);
        std::ofstream out(ctx.out_dir / "jenks.csv", std::ios::binary);
        require(out.good(), "cannot open jenks.csv for writing");
        out << "province_id,value,class\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            out << csv_quote(features.provinces[i].id) << ',' << format12(values[i]) << ','
                << (classes.labels[i] + 1) << '\n';
        detail::write_text(ctx.out_dir / "jenks_map.svg",
                           value_choropleth_svg(ctx.inputs.geometries, values,
                                                "Natural breaks: " + ctx.primary_name()));
    });
}

inline void run_regionalize_stage(PipelineContext& ctx) {
    detail::stage("regionalize", [&] {
        const FeatureTable& features = ctx.inputs.features;
        const CoherenceScores coherence = sweep_regions(
            features, ctx.weights, ctx.inputs.geometries, ctx.config.region_lo,
            ctx.config.region_hi);
        write_json(ctx.out_dir / "coherence.json", coherence_to_json(coherence));
        detail::write_text(ctx.out_dir / "coherence.svg", coherence_svg(coherence));
    });
    const RegionAssignment& assignment = ctx.region_assignment();
    detail::stage("regionalize", [&] {
        std::ofstream out(ctx.out_dir / "regions.csv", std::ios::binary);
        require(out.good(), "cannot open regions.csv for writing");
        out << "province_id,region\n";
        for (std::size_t i = 0; i < assignment.labels.size(); ++i)
            out << csv_quote(ctx.inputs.features.provinces[i].id) << ','
                << (assignment.labels[i] + 1) << '\n';
        detail::write_text(
            ctx.out_dir / "region_map.svg",
            region_map_svg(ctx.inputs.geometries, assignment.labels, assignment.n_regions,
                           "Regions (" + std::to_string(ctx.config.regions) + ")"));
    });
}

inline void run_pca_stage(PipelineContext& ctx) {
    const RegionAssignment& assignment = ctx.region_assignment();
    detail::stage("pca", [&] {
        const FeatureTable& features = ctx.inputs.features;
        const Eigen::MatrixXd standardized = standardize(features);
        const PcaResult result = pca(standardized);
        json obj;
        json names = json::array();
        for (const Factor& factor : features.factors)
            names.push_back(factor.name);
        obj["factors"] = std::move(names);
        json loadings = json::array();
        for (Eigen::Index f = 0; f < result.loadings.rows(); ++f) {
            std::vector<double> row;
            for (Eigen::Index c = 0; c < result.loadings.cols(); ++c)
                row.push_back(result.loadings(f, c));
            loadings.push_back(round12_array(row));
        }
        obj["loadings"] = std::move(loadings);
        const std::vector<double> eigenvalues(
            result.eigenvalues.data(), result.eigenvalues.data() + result.eigenvalues.size());
        obj["eigenvalues"] = round12_array(eigenvalues);
        obj["explained_variance_ratio"] = round12_array(result.explained_variance_ratio);
        obj["cumulative"] = round12_array(result.cumulative);
        json scores = json::array();
        for (Eigen::Index i = 0; i < result.scores.rows(); ++i) {
            json row;
            row["id"] = features.provinces[static_cast<std::size_t>(i)].id;
            std::vector<double> values;
            for (Eigen::Index c = 0; c < result.scores.cols(); ++c)
                values.push_back(result.scores(i, c));
            row["scores"] = round12_array(values);
            scores.push_back(std::move(row));
        }
        obj["scores"] = std::move(scores);
        write_json(ctx.out_dir / "pca.json", obj);

        Eigen::MatrixXd region_means =
            Eigen::MatrixXd::Zero(assignment.n_regions, result.scores.cols());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(assignment.n_regions);
        for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
            region_means.row(assignment.labels[i]) +=
                result.scores.row(static_cast<Eigen::Index>(i));
            counts(assignment.labels[i]) += 1.0;
        }
        for (int r = 0; r < assignment.n_regions; ++r)
            region_means.row(r) /= counts(r);
        std::vector<std::string> factor_names;
        for (const Factor& factor : features.factors)
            factor_names.push_back(factor.name);
        detail::write_text(ctx.out_dir / "biplot.svg",
                           biplot_svg(result, factor_names, region_means));

        const RegionProfile profile =
            region_profile(features, assignment.labels, assignment.n_regions);
        for (int r = 0; r < assignment.n_regions; ++r)
            detail::write_text(ctx.out_dir / ("radar_region_" + std::to_string(r + 1) + ".svg"),
                               radar_svg(profile, static_cast<std::size_t>(r),
                                         "Factor profile: Region " + std::to_string(r + 1)));
    });
}

inline void run_bayes_stage(PipelineContext& ctx) {
    const RegionAssignment& assignment = ctx.region_assignment();
    detail::stage("bayes", [&] {
        const FeatureTable& features = ctx.inputs.features;
        const RegressionData data = make_regression_data(
            features.column_values(features.column("years_of_education")),
            features.column_values(features.column("monthly_income")), assignment.labels,
            assignment.n_regions);

        std::vector<ModelVariant> variants;
        if (ctx.config.variant == "all")
            variants = {ModelVariant::HierDiffSlopes, ModelVariant::HierCommonSlope,
                        ModelVariant::IndependentPerRegion, ModelVariant::PooledSingle};
        else
            variants = {parse_variant(ctx.config.variant)};

        json waic_obj;
        json intervals_obj;
        double best_waic = std::numeric_limits<double>::infinity();
        std::string best_name;
        const ModelVariant preferred =
            ctx.config.variant == "all" ? ModelVariant::HierCommonSlope : variants[0];
        for (std::size_t v = 0; v < variants.size(); ++v) {
            FitConfig fit_config;
            fit_config.seed = derive_seed(ctx.config.seed, 400 + v);
            const PosteriorDraws draws = fit(variants[v], data, fit_config);
            const WaicResult w = waic(draws, data);
            const std::string name = variant_name(variants[v]);

            json wrow;
            wrow["waic"] = round12(w.waic);
            wrow["lppd"] = round12(w.lppd);
            wrow["p_waic"] = round12(w.p_waic);
            wrow["converged"] = draws.converged;
            waic_obj[name] = std::move(wrow);
            if (w.waic < best_waic) {
                best_waic = w.waic;
                best_name = name;
            }

            json params = json::array();
            std::vector<std::string> forest_names;
            std::vector<CredibleInterval> forest_intervals;
            for (std::size_t p = 0; p < draws.names.size(); ++p) {
                const CredibleInterval ci = credible_interval(draws.flat(p), 0.95);
                json row;
                row["name"] = draws.names[p];
                row["low"] = round12(ci.low);
                row["mean"] = round12(ci.mean);
                row["high"] = round12(ci.high);
                row["rhat"] = round12(draws.rhat[p]);
                row["ess"] = round12(draws.ess[p]);
                params.push_back(std::move(row));
                forest_names.push_back(draws.names[p]);
                forest_intervals.push_back(ci);
            }
            json vrow;
            vrow["converged"] = draws.converged;
            vrow["parameters"] = std::move(params);
            intervals_obj[name] = std::move(vrow);

            if (variants[v] == preferred) {
                write_draws_csv(ctx.out_dir / "bayes_draws.csv", draws);
                detail::write_text(ctx.out_dir / "forest.svg",
                                   forest_svg(forest_names, forest_intervals,
                                              "95% credible intervals (" + name + ")"));
                std::vector<double> alpha_mean, beta_mean;
                for (int j = 0; j < data.n_regions; ++j) {
                    alpha_mean.push_back(
                        mean(draws.flat(draws.alpha_col[static_cast<std::size_t>(j)])));
                    beta_mean.push_back(
                        mean(draws.flat(draws.beta_col[static_cast<std::size_t>(j)])));
                }
                detail::write_text(ctx.out_dir / "fitted_lines.svg",
                                   fitted_lines_svg(data, alpha_mean, beta_mean,
                                                    "Posterior-mean fits (" + name + ")"));
            }
        }
        json waic_file;
        waic_file["variants"] = std::move(waic_obj);
        waic_file["best"] = best_name;
        write_json(ctx.out_dir / "waic.json", waic_file);
        write_json(ctx.out_dir / "bayes_intervals.json", intervals_obj);
    });
}

inline void run_gwr_stage(PipelineContext& ctx) {
    detail::stage("gwr", [&] {
        const FeatureTable& features = ctx.inputs.features;
        const std::vector<double> x =
            features.column_values(features.column("years_of_education"));
        const std::vector<double> y = features.column_values(features.column("monthly_income"));
        const GwrResult result = gwr_fit(x, y, ctx.weights);
        const ResidualMoran diag = residual_moran(result, y, ctx.weights, ctx.config.n_perm,
                                                  derive_seed(ctx.config.seed, 500));

        std::ofstream out(ctx.out_dir / "gwr.csv", std::ios::binary);
        require(out.good(), "cannot open gwr.csv for writing");
        out << "province_id,intercept,slope,slope_se,fitted,residual\n";
        for (std::size_t i = 0; i < result.units.size(); ++i) {
            const GwrUnit& unit = result.units[i];
            out << csv_quote(features.provinces[i].id) << ',' << format12(unit.intercept) << ','
                << format12(unit.slope) << ',' << format12(unit.slope_se) << ','
                << format12(unit.fitted) << ',' << format12(unit.residual) << '\n';
        }
        json obj;
        obj["exact_fit"] = diag.exact_fit;
        if (!diag.exact_fit)
            obj["residual_moran"] = moran_to_json(diag.moran);
        write_json(ctx.out_dir / "gwr.json", obj);

        std::vector<double> fitted, slopes, residuals;
        for (const GwrUnit& unit : result.units) {
            fitted.push_back(unit.fitted);
            slopes.push_back(unit.slope);
            residuals.push_back(unit.residual);
        }
        const std::vector<double> residual_lag = ctx.weights.lag(residuals);
        const std::vector<RegionGeometry>& geoms = ctx.inputs.geometries;
        detail::write_text(ctx.out_dir / "gwr_fitted_map.svg",
                           value_choropleth_svg(geoms, fitted, "GWR fitted income"));
        detail::write_text(ctx.out_dir / "gwr_slope_map.svg",
                           value_choropleth_svg(geoms, slopes, "GWR local slope"));
        detail::write_text(ctx.out_dir / "gwr_residual_map.svg",
                           value_choropleth_svg(geoms, residuals, "GWR residuals"));
        detail::write_text(ctx.out_dir / "gwr_residual_lag_map.svg",
                           value_choropleth_svg(geoms, residual_lag,
                                                "GWR residual spatial lag"));
    });
}

/// Runs every stage in order, writing all artifacts (JSON/CSV results plus
/// SVG figures) into the output directory. Every numeric output is
/// deterministic given the configuration and seed.
inline void run_pipeline(const PipelineConfig& config) {
    PipelineContext ctx(config);
    run_weights_stage(ctx);
    run_moran_stage(ctx);
    run_localmoran_stage(ctx);
    run_jenks_stage(ctx);
    run_regionalize_stage(ctx);
    run_pca_stage(ctx);
    run_bayes_stage(ctx);
    run_gwr_stage(ctx);
}

} // namespace regionlab
