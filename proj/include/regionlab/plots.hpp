#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "regionlab/bayes.hpp"
#include "regionlab/classify.hpp"
#include "regionlab/esda.hpp"
#include "regionlab/geometry.hpp"
#include "regionlab/pca.hpp"
#include "regionlab/regionalize.hpp"
#include "regionlab/svg.hpp"

namespace regionlab {

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

/// Classed map: one fill color per unit plus a swatch legend.
inline std::string choropleth_svg(const std::vector<RegionGeometry>& geometries,
                                  const std::vector<std::string>& fill_of,
                                  const std::vector<std::pair<std::string, std::string>>& legend,
                                  const std::string& title) {
    require(fill_of.size() == geometries.size(), "fill/geometry count mismatch");
    Svg svg(820, 560);
    svg.text(410, 24, title, 15, "middle");
    const Frame frame = map_frame(geometries, 20, 40, 600, 500);
    for (std::size_t i = 0; i < geometries.size(); ++i) {
        std::vector<Ring> rings;
        for (const Ring& ring : geometries[i].rings) {
            Ring mapped;
            for (const Point& p : ring)
                mapped.push_back(frame.map(p));
            rings.push_back(std::move(mapped));
        }
        svg.polygon_with_holes(rings, fill_of[i]);
    }
    double y = 60.0;
    for (const auto& [label, color] : legend) {
        svg.rect(650, y - 10, 14, 14, color, "#333333");
        svg.text(670, y + 1, label, 11);
        y += 22.0;
    }
    return svg.str();
}

/// Continuous values binned with natural breaks (up to five classes) and
/// drawn on the sequential ramp; legend shows each class range.
inline std::string value_choropleth_svg(const std::vector<RegionGeometry>& geometries,
                                        const std::vector<double>& values,
                                        const std::string& title) {
    require(values.size() == geometries.size(), "value/geometry count mismatch");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t distinct =
        static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    const int k = static_cast<int>(std::min<std::size_t>(5, distinct));

    std::vector<std::string> fills(values.size());
    std::vector<std::pair<std::string, std::string>> legend;
    if (k <= 1) {
        for (auto& fill : fills)
            fill = sequential_ramp()[2];
        legend.emplace_back(tick_label(values.empty() ? 0.0 : values[0]), sequential_ramp()[2]);
    } else {
        const Classification classes = fisher_jenks(values, k);
        const double lo = *std::min_element(values.begin(), values.end());
        const double hi = *std::max_element(values.begin(), values.end());
        for (std::size_t i = 0; i < values.size(); ++i)
            fills[i] = sequential_ramp()[static_cast<std::size_t>(classes.labels[i]) *
                                         sequential_ramp().size() / static_cast<std::size_t>(k)];
        double lower = lo;
        for (int c = 0; c < k; ++c) {
            const double upper =
                c + 1 < k ? classes.breaks[static_cast<std::size_t>(c)] : hi;
            legend.emplace_back(tick_label(lower) + " - " + tick_label(upper),
                                sequential_ramp()[static_cast<std::size_t>(c) *
                                                  sequential_ramp().size() /
                                                  static_cast<std::size_t>(k)]);
            lower = upper;
        }
    }
    return choropleth_svg(geometries, fills, legend, title);
}

/// Moran cluster map with the conventional colors.
inline std::string cluster_map_svg(const std::vector<RegionGeometry>& geometries,
                                   const std::vector<std::string>& cluster_labels,
                                   const std::string& title) {
    std::vector<std::string> fills;
    for (const std::string& label : cluster_labels)
        fills.push_back(cluster_color(label));
    std::vector<std::pair<std::string, std::string>> legend = {
        {"High-High", cluster_color("HH")}, {"High-Low", cluster_color("HL")},
        {"Low-High", cluster_color("LH")},  {"Low-Low", cluster_color("LL")},
        {"Not significant", cluster_color("NS")}};
    return choropleth_svg(geometries, fills, legend, title);
}

/// Region-identity map with qualitative colors.
inline std::string region_map_svg(const std::vector<RegionGeometry>& geometries,
                                  const std::vector<int>& labels, int n_regions,
                                  const std::string& title) {
    std::vector<std::string> fills;
    for (int label : labels)
        fills.push_back(region_color(static_cast<std::size_t>(label)));
    std::vector<std::pair<std::string, std::string>> legend;
    for (int r = 0; r < n_regions; ++r)
        legend.emplace_back("Region " + std::to_string(r + 1),
                            region_color(static_cast<std::size_t>(r)));
    return choropleth_svg(geometries, fills, legend, title);
}

// ---------------------------------------------------------------------------
// Autocorrelation figures
// ---------------------------------------------------------------------------

/// Scatter of centered values against their spatial lag with the fitted
/// least-squares line, whose slope is the global Moran statistic.
inline std::string moran_scatter_svg(const MoranPlot& plot, const std::string& title) {
    Svg svg(640, 560);
    svg.text(320, 24, title, 15, "middle");
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < plot.z.size(); ++i) {
        lo = std::min({lo, plot.z[i], plot.lag[i]});
        hi = std::max({hi, plot.z[i], plot.lag[i]});
    }
    const double pad = (hi - lo) * 0.05 + 1e-12;
    lo -= pad;
    hi += pad;
    const Frame frame(lo, lo, hi, hi, 70, 50, 520, 440);
    draw_axes(svg, frame, lo, hi, lo, hi, "value (centered)", "spatial lag");
    svg.line(frame.x(0.0), frame.top(), frame.x(0.0), frame.bottom(), "#999999", 0.8, "4,3");
    svg.line(frame.left(), frame.y(0.0), frame.right(), frame.y(0.0), "#999999", 0.8, "4,3");
    for (std::size_t i = 0; i < plot.z.size(); ++i)
        svg.circle(frame.x(plot.z[i]), frame.y(plot.lag[i]), 2.4, "#2c7bb680", "#2c7bb6");
    svg.polyline({{frame.x(lo), frame.y(plot.intercept + plot.slope * lo)},
                  {frame.x(hi), frame.y(plot.intercept + plot.slope * hi)}},
                 "#d7191c", 1.8);
    svg.text(frame.right() - 6, frame.top() + 14, "slope = " + tick_label(plot.slope), 11, "end");
    return svg.str();
}

/// Histogram of the permutation distribution with the observed statistic
/// and its null expectation marked.
inline std::string permutation_hist_svg(const MoranResult& result, const std::string& title) {
    Svg svg(640, 480);
    svg.text(320, 24, title, 15, "middle");
    double lo = result.observed, hi = result.observed;
    for (double v : result.perm_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double pad = (hi - lo) * 0.08 + 1e-12;
    lo -= pad;
    hi += pad;
    constexpr int kBins = 30;
    std::vector<int> counts(kBins, 0);
    for (double v : result.perm_values) {
        int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
        counts[std::clamp(b, 0, kBins - 1)] += 1;
    }
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    const Frame frame(lo, 0.0, hi, static_cast<double>(peak), 70, 50, 520, 360);
    draw_axes(svg, frame, lo, hi, 0.0, peak, "Moran's I under permutation", "count");
    const double bin_width = (frame.right() - frame.left()) / kBins;
    for (int b = 0; b < kBins; ++b) {
        const double h = frame.bottom() - frame.y(counts[b]);
        if (counts[b] > 0)
            svg.rect(frame.left() + b * bin_width, frame.y(counts[b]), bin_width - 0.5, h,
                     "#74add1");
    }
    svg.line(frame.x(result.expectation), frame.top(), frame.x(result.expectation),
             frame.bottom(), "#555555", 1.2, "5,4");
    svg.line(frame.x(result.observed), frame.top(), frame.x(result.observed), frame.bottom(),
             "#d7191c", 1.8);
    svg.text(frame.right() - 6, frame.top() + 14,
             "observed = " + tick_label(result.observed) + ", p = " + tick_label(result.p_value),
             11, "end");
    return svg.str();
}

// ---------------------------------------------------------------------------
// Regionalization figures
// ---------------------------------------------------------------------------

/// Two panels over the candidate region counts: geographic coherence with
/// the silhouette-based combination, and with the Calinski-Harabasz-based
/// combination.
inline std::string coherence_svg(const CoherenceScores& scores) {
    Svg svg(920, 480);
    svg.text(460, 24, "Region-count sweep: geographic and feature coherence", 15, "middle");
    require(!scores.candidates.empty(), "empty sweep");
    const double k0 = scores.candidates.front().n_regions;
    const double k1 = scores.candidates.back().n_regions;

    struct Series {
        std::string name;
        std::string color;
        std::vector<double> values;
        std::string dash;
    };
    auto panel = [&](double px, const std::string& caption, const std::vector<Series>& series) {
        double hi = 1.0;
        for (const Series& s : series)
            for (double v : s.values)
                hi = std::max(hi, v);
        const Frame frame(k0, 0.0, k1, hi * 1.05, px, 60, 340, 330);
        draw_axes(svg, frame, k0, k1, 0.0, hi * 1.05, "number of regions", "normalized score");
        double ly = frame.top() + 12;
        for (const Series& s : series) {
            std::vector<Point> pts;
            for (std::size_t i = 0; i < scores.candidates.size(); ++i)
                pts.push_back({frame.x(scores.candidates[i].n_regions), frame.y(s.values[i])});
            svg.polyline(pts, s.color, 1.8, s.dash);
            for (const Point& p : pts)
                svg.circle(p.x, p.y, 2.5, s.color);
            svg.line(frame.left() + 8, ly, frame.left() + 28, ly, s.color, 1.8, s.dash);
            svg.text(frame.left() + 34, ly + 3, s.name, 10);
            ly += 16;
        }
        svg.text(px + 170, 470, caption, 12, "middle");
    };

    std::vector<double> ipq, sil, ch, comb_sil, comb_ch;
    for (const CandidateScore& c : scores.candidates) {
        ipq.push_back(c.norm_ipq);
        sil.push_back(c.norm_silhouette);
        ch.push_back(c.norm_ch);
        comb_sil.push_back(c.combined_silhouette);
        comb_ch.push_back(c.combined_ch);
    }
    panel(80, "isoperimetric quotient + silhouette",
          {{"norm. IPQ", "#1b9e77", ipq, "5,3"},
           {"norm. silhouette", "#7570b3", sil, "5,3"},
           {"combined", "#d95f02", comb_sil, ""}});
    panel(520, "isoperimetric quotient + Calinski-Harabasz",
          {{"norm. IPQ", "#1b9e77", ipq, "5,3"},
           {"norm. Calinski-Harabasz", "#7570b3", ch, "5,3"},
           {"combined", "#d95f02", comb_ch, ""}});
    return svg.str();
}

/// Radar chart of one region's normalized factor profile.
inline std::string radar_svg(const RegionProfile& profile, std::size_t region,
                             const std::string& title) {
    require(region < static_cast<std::size_t>(profile.normalized.rows()), "region out of range");
    const std::size_t p = profile.factor_names.size();
    require(p >= 3, "radar needs at least 3 axes");
    Svg svg(560, 560);
    svg.text(280, 24, title, 15, "middle");
    const double cx = 280, cy = 300, radius = 180;
    auto spoke = [&](std::size_t axis, double r) {
        const double angle = -1.5707963267948966 +
                             2.0 * 3.14159265358979323846 * static_cast<double>(axis) /
                                 static_cast<double>(p);
        return Point{cx + r * radius * std::cos(angle), cy + r * radius * std::sin(angle)};
    };
    for (double ring : {0.25, 0.5, 0.75, 1.0}) {
        std::vector<Point> pts;
        for (std::size_t a = 0; a <= p; ++a)
            pts.push_back(spoke(a % p, ring));
        svg.polyline(pts, "#cccccc", 0.8);
    }
    for (std::size_t a = 0; a < p; ++a) {
        const Point end = spoke(a, 1.0);
        svg.line(cx, cy, end.x, end.y, "#cccccc", 0.8);
        const Point lab = spoke(a, 1.18);
        svg.text(lab.x, lab.y, profile.factor_names[a], 10, "middle");
    }
    std::vector<Point> shape;
    for (std::size_t a = 0; a <= p; ++a)
        shape.push_back(spoke(a % p, profile.normalized(static_cast<Eigen::Index>(region),
                                                        static_cast<Eigen::Index>(a % p))));
    svg.polygon(shape, region_color(region), region_color(region), 1.5, 0.35);
    return svg.str();
}

// ---------------------------------------------------------------------------
// PCA figures
// ---------------------------------------------------------------------------

/// Two panels: factor loadings on the first two components, and region
/// means in the same component space.
inline std::string biplot_svg(const PcaResult& result, const std::vector<std::string>& factor_names,
                              const Eigen::MatrixXd& region_mean_scores) {
    require(result.loadings.cols() >= 2, "biplot needs at least two components");
    Svg svg(960, 520);
    svg.text(480, 24, "Principal components: factor loadings and region means", 15, "middle");
    const std::string pc1 =
        "PC1 (" + tick_label(100.0 * result.explained_variance_ratio[0]) + "%)";
    const std::string pc2 =
        "PC2 (" + tick_label(100.0 * result.explained_variance_ratio[1]) + "%)";

    {
        const Frame frame(-1.05, -1.05, 1.05, 1.05, 70, 60, 360, 360);
        draw_axes(svg, frame, -1.05, 1.05, -1.05, 1.05, pc1, pc2);
        svg.line(frame.x(0), frame.top(), frame.x(0), frame.bottom(), "#bbbbbb", 0.8, "4,3");
        svg.line(frame.left(), frame.y(0), frame.right(), frame.y(0), "#bbbbbb", 0.8, "4,3");
        for (std::size_t f = 0; f < factor_names.size(); ++f) {
            const double lx = result.loadings(static_cast<Eigen::Index>(f), 0);
            const double ly = result.loadings(static_cast<Eigen::Index>(f), 1);
            svg.polyline({{frame.x(0), frame.y(0)}, {frame.x(lx), frame.y(ly)}}, "#d95f02", 1.5);
            svg.circle(frame.x(lx), frame.y(ly), 2.5, "#d95f02");
            svg.text(frame.x(lx * 1.08), frame.y(ly * 1.08), factor_names[f], 9,
                     lx >= 0 ? "start" : "end");
        }
        svg.text(250, 500, "factor loadings", 12, "middle");
    }
    {
        double lo = -1.0, hi = 1.0;
        for (Eigen::Index r = 0; r < region_mean_scores.rows(); ++r) {
            lo = std::min({lo, region_mean_scores(r, 0), region_mean_scores(r, 1)});
            hi = std::max({hi, region_mean_scores(r, 0), region_mean_scores(r, 1)});
        }
        const double pad = (hi - lo) * 0.1;
        lo -= pad;
        hi += pad;
        const Frame frame(lo, lo, hi, hi, 540, 60, 360, 360);
        draw_axes(svg, frame, lo, hi, lo, hi, pc1, pc2);
        svg.line(frame.x(0), frame.top(), frame.x(0), frame.bottom(), "#bbbbbb", 0.8, "4,3");
        svg.line(frame.left(), frame.y(0), frame.right(), frame.y(0), "#bbbbbb", 0.8, "4,3");
        for (Eigen::Index r = 0; r < region_mean_scores.rows(); ++r) {
            svg.circle(frame.x(region_mean_scores(r, 0)), frame.y(region_mean_scores(r, 1)), 5,
                       region_color(static_cast<std::size_t>(r)), "#333333");
            svg.text(frame.x(region_mean_scores(r, 0)) + 8, frame.y(region_mean_scores(r, 1)) + 3,
                     "Region " + std::to_string(r + 1), 10);
        }
        svg.text(720, 500, "region means in component space", 12, "middle");
    }
    return svg.str();
}

// ---------------------------------------------------------------------------
// Regression figures
// ---------------------------------------------------------------------------

/// Forest plot of credible intervals, one row per parameter.
inline std::string forest_svg(const std::vector<std::string>& names,
                              const std::vector<CredibleInterval>& intervals,
                              const std::string& title) {
    require(names.size() == intervals.size(), "name/interval count mismatch");
    require(!names.empty(), "empty forest plot");
    const double row_height = 26.0;
    const double height = 110.0 + row_height * static_cast<double>(names.size());
    Svg svg(720, height);
    svg.text(360, 24, title, 15, "middle");
    double lo = intervals[0].low, hi = intervals[0].high;
    for (const CredibleInterval& ci : intervals) {
        lo = std::min(lo, ci.low);
        hi = std::max(hi, ci.high);
    }
    const double pad = (hi - lo) * 0.06 + 1e-12;
    lo -= pad;
    hi += pad;
    const Frame frame(lo, 0.0, hi, 1.0, 190, 50, 480, height - 110.0);
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        svg.line(frame.x(v), frame.top(), frame.x(v), frame.bottom(), "#eeeeee", 1.0);
        svg.text(frame.x(v), frame.bottom() + 16, tick_label(v), 10, "middle");
    }
    if (lo < 0.0 && hi > 0.0)
        svg.line(frame.x(0.0), frame.top(), frame.x(0.0), frame.bottom(), "#999999", 1.0, "4,3");
    for (std::size_t r = 0; r < names.size(); ++r) {
        const double y = frame.top() + row_height * (static_cast<double>(r) + 0.5);
        svg.text(182, y + 3, names[r], 11, "end");
        svg.line(frame.x(intervals[r].low), y, frame.x(intervals[r].high), y, "#2c7bb6", 2.0);
        svg.circle(frame.x(intervals[r].mean), y, 3.2, "#d7191c");
    }
    return svg.str();
}

/// Small-multiple scatter of income on education per region with the
/// posterior-mean fitted line and a dashed vertical reference at 12
/// years of education.
inline std::string fitted_lines_svg(const RegressionData& data,
                                    const std::vector<double>& alpha_mean,
                                    const std::vector<double>& beta_mean,
                                    const std::string& title) {
    const std::size_t J = static_cast<std::size_t>(data.n_regions);
    require(alpha_mean.size() == J && beta_mean.size() == J, "posterior mean count mismatch");
    const int cols = 3;
    const int rows = static_cast<int>((J + cols - 1) / cols);
    const double pw = 270, ph = 230;
    Svg svg(40 + pw * cols, 70 + ph * rows);
    svg.text((40 + pw * cols) / 2.0, 24, title, 15, "middle");

    double x0 = data.x[0], x1 = data.x[0], y0 = data.y[0], y1 = data.y[0];
    for (std::size_t i = 0; i < data.x.size(); ++i) {
        x0 = std::min(x0, data.x[i]);
        x1 = std::max(x1, data.x[i]);
        y0 = std::min(y0, data.y[i]);
        y1 = std::max(y1, data.y[i]);
    }
    x0 = std::min(x0, 11.5);
    x1 = std::max(x1, 12.5);
    const double ypad = (y1 - y0) * 0.08 + 1e-12;
    y0 -= ypad;
    y1 += ypad;

    for (std::size_t j = 0; j < J; ++j) {
        const double px = 50 + pw * static_cast<double>(j % cols);
        const double py = 50 + ph * static_cast<double>(j / cols);
        const Frame frame(x0, y0, x1, y1, px, py, pw - 60, ph - 70);
        draw_axes(svg, frame, x0, x1, y0, y1, "years of education", "monthly income");
        svg.text(px + (pw - 60) / 2.0, py - 6, "Region " + std::to_string(j + 1), 11, "middle");
        svg.line(frame.x(12.0), frame.top(), frame.x(12.0), frame.bottom(), "#777777", 1.0,
                 "5,4");
        for (std::size_t i : data.members[j])
            svg.circle(frame.x(data.x[i]), frame.y(data.y[i]), 2.4, "#2c7bb6");
        const double xbar = data.region_x_mean[j];
        svg.polyline({{frame.x(x0), frame.y(alpha_mean[j] + beta_mean[j] * (x0 - xbar))},
                      {frame.x(x1), frame.y(alpha_mean[j] + beta_mean[j] * (x1 - xbar))}},
                     "#d7191c", 1.8);
    }
    return svg.str();
}

} // namespace regionlab
