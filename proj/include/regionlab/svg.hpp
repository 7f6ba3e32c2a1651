#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "regionlab/error.hpp"
#include "regionlab/geometry.hpp"

namespace regionlab {

// ---------------------------------------------------------------------------
// Color conventions
// ---------------------------------------------------------------------------

/// Sequential 5-class ramp (light to dark) for choropleths.
inline const std::vector<std::string>& sequential_ramp() {
    static const std::vector<std::string> ramp = {"#ffffb2", "#fecc5c", "#fd8d3c", "#f03b20",
                                                  "#bd0026"};
    return ramp;
}

/// Conventional Moran-cluster colors.
inline std::string cluster_color(const std::string& label) {
    if (label == "HH")
        return "#d7191c";
    if (label == "HL")
        return "#fdae61";
    if (label == "LH")
        return "#abd9e9";
    if (label == "LL")
        return "#2c7bb6";
    return "#bdbdbd"; // not significant
}

/// Qualitative palette for region identities.
inline std::string region_color(std::size_t region) {
    static const std::vector<std::string> palette = {"#66c2a5", "#fc8d62", "#8da0cb",
                                                     "#e78ac3", "#a6d854", "#ffd92f",
                                                     "#e5c494", "#b3b3b3", "#80b1d3"};
    return palette[region % palette.size()];
}

// ---------------------------------------------------------------------------
// Canvas
// ---------------------------------------------------------------------------

/// Minimal SVG writer. All coordinates are formatted with two decimals so
/// identical inputs yield byte-identical files; no timestamps or other
/// run-dependent content are emitted.
class Svg {
public:
    Svg(double width, double height) : width_(width), height_(height) {}

    static std::string num(double v) {
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "%.2f", v);
        return buffer;
    }

    static std::string escape(const std::string& text) {
        std::string out;
        for (char c : text) {
            switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
            }
        }
        return out;
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& dash = "") {
        body_ << "  <line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
              << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
              << num(width) << "\"";
        if (!dash.empty())
            body_ << " stroke-dasharray=\"" << dash << "\"";
        body_ << "/>\n";
    }

    void polyline(const std::vector<Point>& points, const std::string& stroke,
                  double width = 1.5, const std::string& dash = "") {
        body_ << "  <polyline points=\"" << coords(points) << "\" fill=\"none\" stroke=\""
              << stroke << "\" stroke-width=\"" << num(width) << "\"";
        if (!dash.empty())
            body_ << " stroke-dasharray=\"" << dash << "\"";
        body_ << "/>\n";
    }

    void polygon(const std::vector<Point>& points, const std::string& fill,
                 const std::string& stroke = "#333333", double stroke_width = 0.6,
                 double opacity = 1.0) {
        body_ << "  <polygon points=\"" << coords(points) << "\" fill=\"" << fill
              << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(stroke_width) << "\"";
        if (opacity < 1.0)
            body_ << " fill-opacity=\"" << num(opacity) << "\"";
        body_ << "/>\n";
    }

    /// Polygon with holes via an even-odd path.
    void polygon_with_holes(const std::vector<Ring>& rings, const std::string& fill,
                            const std::string& stroke = "#333333", double stroke_width = 0.6) {
        body_ << "  <path d=\"";
        for (const Ring& ring : rings) {
            for (std::size_t i = 0; i + 1 < ring.size(); ++i)
                body_ << (i == 0 ? "M" : "L") << num(ring[i].x) << ' ' << num(ring[i].y);
            body_ << "Z";
        }
        body_ << "\" fill=\"" << fill << "\" fill-rule=\"evenodd\" stroke=\"" << stroke
              << "\" stroke-width=\"" << num(stroke_width) << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "none") {
        body_ << "  <circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
              << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none") {
        body_ << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
              << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
              << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, double size = 12.0,
              const std::string& anchor = "start", const std::string& fill = "#222222",
              double rotate = 0.0) {
        body_ << "  <text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\""
              << num(size) << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor
              << "\" fill=\"" << fill << "\"";
        if (rotate != 0.0)
            body_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y)
                  << ")\"";
        body_ << ">" << escape(s) << "</text>\n";
    }

    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_)
            << "\" height=\"" << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' '
            << num(height_) << "\">\n"
            << "  <rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\""
            << num(height_) << "\" fill=\"#ffffff\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        require(out.good(), "cannot open '", path, "' for writing");
        out << str();
    }

private:
    static std::string coords(const std::vector<Point>& points) {
        std::ostringstream out;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i)
                out << ' ';
            out << num(points[i].x) << ',' << num(points[i].y);
        }
        return out.str();
    }

    double width_, height_;
    std::ostringstream body_;
};

// ---------------------------------------------------------------------------
// Data-to-canvas mapping
// ---------------------------------------------------------------------------

/// Affine map from a data rectangle to a canvas rectangle. The vertical
/// axis flips because SVG y grows downward.
class Frame {
public:
    Frame(double x0, double y0, double x1, double y1, // data bounds
          double px, double py, double pw, double ph) // canvas rect
        : x0_(x0), y0_(y0), px_(px), py_(py), pw_(pw), ph_(ph) {
        const double dx = x1 - x0;
        const double dy = y1 - y0;
        sx_ = dx != 0.0 ? pw / dx : 0.0;
        sy_ = dy != 0.0 ? ph / dy : 0.0;
    }

    double x(double v) const { return px_ + (v - x0_) * sx_; }
    double y(double v) const { return py_ + ph_ - (v - y0_) * sy_; }
    Point map(const Point& p) const { return {x(p.x), y(p.y)}; }

    double left() const { return px_; }
    double top() const { return py_; }
    double right() const { return px_ + pw_; }
    double bottom() const { return py_ + ph_; }

private:
    double x0_, y0_, px_, py_, pw_, ph_, sx_, sy_;
};

/// Equal-aspect frame that letterboxes the data bounds inside the canvas
/// rectangle; used for maps so shapes keep their proportions.
inline Frame map_frame(const std::vector<RegionGeometry>& geometries, double px, double py,
                       double pw, double ph, double margin = 0.02) {
    require(!geometries.empty(), "no geometries to draw");
    double x0 = geometries[0].rings[0][0].x, x1 = x0;
    double y0 = geometries[0].rings[0][0].y, y1 = y0;
    for (const RegionGeometry& g : geometries)
        for (const Ring& ring : g.rings)
            for (const Point& p : ring) {
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
            }
    const double mx = (x1 - x0) * margin;
    const double my = (y1 - y0) * margin;
    x0 -= mx;
    x1 += mx;
    y0 -= my;
    y1 += my;
    const double dx = std::max(x1 - x0, 1e-12);
    const double dy = std::max(y1 - y0, 1e-12);
    const double scale = std::min(pw / dx, ph / dy);
    const double w = dx * scale;
    const double h = dy * scale;
    return Frame(x0, y0, x1, y1, px + (pw - w) / 2.0, py + (ph - h) / 2.0, w, h);
}

/// Short numeric label for legends and axis ticks.
inline std::string tick_label(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.4g", v);
    return buffer;
}

/// Draws plot axes with five evenly spaced labeled ticks.
inline void draw_axes(Svg& svg, const Frame& frame, double x0, double x1, double y0, double y1,
                      const std::string& x_label, const std::string& y_label) {
    svg.line(frame.left(), frame.bottom(), frame.right(), frame.bottom(), "#222222", 1.0);
    svg.line(frame.left(), frame.top(), frame.left(), frame.bottom(), "#222222", 1.0);
    for (int t = 0; t <= 4; ++t) {
        const double fx = x0 + (x1 - x0) * t / 4.0;
        const double fy = y0 + (y1 - y0) * t / 4.0;
        svg.line(frame.x(fx), frame.bottom(), frame.x(fx), frame.bottom() + 4, "#222222", 1.0);
        svg.text(frame.x(fx), frame.bottom() + 16, tick_label(fx), 10, "middle");
        svg.line(frame.left() - 4, frame.y(fy), frame.left(), frame.y(fy), "#222222", 1.0);
        svg.text(frame.left() - 6, frame.y(fy) + 3, tick_label(fy), 10, "end");
    }
    svg.text((frame.left() + frame.right()) / 2.0, frame.bottom() + 32, x_label, 11, "middle");
    svg.text(frame.left() - 40, (frame.top() + frame.bottom()) / 2.0, y_label, 11, "middle",
             "#222222", -90.0);
}

} // namespace regionlab
