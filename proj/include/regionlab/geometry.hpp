#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "regionlab/error.hpp"

namespace regionlab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Closed coordinate ring; after normalization the first vertex equals the
/// last, outer rings wind counter-clockwise and holes clockwise.
using Ring = std::vector<Point>;

struct ProvinceId {
    std::string id;
    std::string name;
};

/// One polygon part: outer boundary plus interior holes.
struct PolygonPart {
    Ring outer;
    std::vector<Ring> holes;
};

struct RegionGeometry {
    ProvinceId id;
    std::vector<Ring> rings; // normalized; outers CCW, holes CW
    Point centroid;
    double area = 0.0;      // holes subtracted; always > 0
    double perimeter = 0.0; // holes add to the boundary length
};

/// Shoelace formula; positive for counter-clockwise rings.
inline double ring_signed_area(const Ring& ring) {
    double twice = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    return 0.5 * twice;
}

inline double ring_length(const Ring& ring) {
    double length = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        length += std::hypot(ring[i + 1].x - ring[i].x, ring[i + 1].y - ring[i].y);
    return length;
}

namespace detail {

/// Area-weighted centroid contribution of one ring, scaled by its signed
/// area (so holes pull with negative weight).
inline void ring_centroid_accumulate(const Ring& ring, double& cx, double& cy, double& total_area) {
    double ax = 0.0;
    double ay = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double cross = ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
        ax += (ring[i].x + ring[i + 1].x) * cross;
        ay += (ring[i].y + ring[i + 1].y) * cross;
    }
    cx += ax / 6.0;
    cy += ay / 6.0;
    total_area += ring_signed_area(ring);
}

inline std::size_t distinct_vertex_count(const Ring& ring) {
    std::vector<std::pair<double, double>> seen;
    seen.reserve(ring.size());
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        seen.emplace_back(ring[i].x, ring[i].y);
    if (!ring.empty() && !(ring.front().x == ring.back().x && ring.front().y == ring.back().y))
        seen.emplace_back(ring.back().x, ring.back().y);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    return seen.size();
}

inline Ring closed(Ring ring) {
    if (!ring.empty() && !(ring.front().x == ring.back().x && ring.front().y == ring.back().y))
        ring.push_back(ring.front());
    return ring;
}

inline Ring oriented(Ring ring, bool counter_clockwise) {
    const double signed_area = ring_signed_area(ring);
    if ((signed_area > 0.0) != counter_clockwise)
        std::reverse(ring.begin(), ring.end());
    return ring;
}

} // namespace detail

/// Validates and normalizes polygon parts into a RegionGeometry with
/// centroid, area and perimeter attached.
inline RegionGeometry make_region(ProvinceId id, const std::vector<PolygonPart>& parts) {
    require(!parts.empty(), "region '", id.id, "': no polygon parts");
    RegionGeometry region;
    region.id = std::move(id);
    double cx = 0.0;
    double cy = 0.0;
    double signed_total = 0.0;
    for (const PolygonPart& part : parts) {
        Ring outer = detail::closed(part.outer);
        require(detail::distinct_vertex_count(outer) >= 3,
                "region '", region.id.id, "': degenerate ring (< 3 distinct vertices)");
        outer = detail::oriented(std::move(outer), true);
        detail::ring_centroid_accumulate(outer, cx, cy, signed_total);
        region.perimeter += ring_length(outer);
        region.rings.push_back(std::move(outer));
        for (const Ring& hole_in : part.holes) {
            Ring hole = detail::closed(hole_in);
            require(detail::distinct_vertex_count(hole) >= 3,
                    "region '", region.id.id, "': degenerate hole ring");
            hole = detail::oriented(std::move(hole), false);
            detail::ring_centroid_accumulate(hole, cx, cy, signed_total);
            region.perimeter += ring_length(hole);
            region.rings.push_back(std::move(hole));
        }
    }
    require(signed_total > 0.0, "region '", region.id.id, "': degenerate (zero-area) polygon");
    region.area = signed_total;
    region.centroid = Point{cx / signed_total, cy / signed_total};
    return region;
}

inline Point centroid(const RegionGeometry& region) { return region.centroid; }

/// Isoperimetric quotient 4*pi*A/L^2; 1 for a disk, small for wormy shapes.
inline double ipq(const RegionGeometry& region) {
    require(region.area > 0.0 && region.perimeter > 0.0,
            "ipq: degenerate region '", region.id.id, "'");
    return 4.0 * M_PI * region.area / (region.perimeter * region.perimeter);
}

namespace detail {

inline bool ring_contains(const Ring& ring, Point p) {
    bool inside = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const Point a = ring[i];
        const Point b = ring[i + 1];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

using SnapKey = std::pair<std::int64_t, std::int64_t>;

inline SnapKey snap(Point p, double tolerance) {
    return {static_cast<std::int64_t>(std::llround(p.x / tolerance)),
            static_cast<std::int64_t>(std::llround(p.y / tolerance))};
}

} // namespace detail

/// Merges member geometries into one region outline. Edges shared by exactly
/// two members cancel; the remaining edges are stitched into closed rings.
/// Area is the sum of member areas, perimeter the length of surviving edges.
/// Vertices are matched on a grid of 1e-9 of the bounding-box diagonal.
inline RegionGeometry dissolve(const std::vector<RegionGeometry>& members, ProvinceId id = {}) {
    require(!members.empty(), "dissolve: no members");
    if (members.size() == 1) {
        RegionGeometry only = members.front();
        if (!id.id.empty())
            only.id = std::move(id);
        return only;
    }

    double min_x = members[0].rings[0][0].x;
    double max_x = min_x;
    double min_y = members[0].rings[0][0].y;
    double max_y = min_y;
    for (const RegionGeometry& member : members)
        for (const Ring& ring : member.rings)
            for (const Point& p : ring) {
                min_x = std::min(min_x, p.x);
                max_x = std::max(max_x, p.x);
                min_y = std::min(min_y, p.y);
                max_y = std::max(max_y, p.y);
            }
    const double diagonal = std::hypot(max_x - min_x, max_y - min_y);
    const double tolerance = std::max(diagonal, 1.0) * 1e-9;

    // Representative original coordinates per snapped vertex.
    std::map<detail::SnapKey, Point> vertex_of;
    using EdgeKey = std::pair<detail::SnapKey, detail::SnapKey>;
    std::map<EdgeKey, int> edge_count;
    for (const RegionGeometry& member : members)
        for (const Ring& ring : member.rings)
            for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
                const auto a = detail::snap(ring[i], tolerance);
                const auto b = detail::snap(ring[i + 1], tolerance);
                if (a == b)
                    continue; // collapsed by snapping
                vertex_of.try_emplace(a, ring[i]);
                vertex_of.try_emplace(b, ring[i + 1]);
                const EdgeKey key = a < b ? EdgeKey{a, b} : EdgeKey{b, a};
                ++edge_count[key];
            }

    double boundary_length = 0.0;
    std::map<detail::SnapKey, std::vector<detail::SnapKey>> adjacency;
    for (const auto& [key, count] : edge_count) {
        require(count <= 2, "dissolve: edge shared by ", count,
                " members; inconsistent shared borders");
        if (count == 1) {
            const Point a = vertex_of.at(key.first);
            const Point b = vertex_of.at(key.second);
            boundary_length += std::hypot(b.x - a.x, b.y - a.y);
            adjacency[key.first].push_back(key.second);
            adjacency[key.second].push_back(key.first);
        }
    }

    // Walk the surviving edges into closed rings.
    std::map<EdgeKey, int> used;
    std::vector<Ring> rings;
    for (const auto& [start, neighbors] : adjacency) {
        (void)neighbors;
        for (;;) {
            detail::SnapKey current = start;
            detail::SnapKey next_vertex{};
            bool found = false;
            for (const auto& nb : adjacency.at(current)) {
                const EdgeKey key = current < nb ? EdgeKey{current, nb} : EdgeKey{nb, current};
                if (used[key] == 0) {
                    next_vertex = nb;
                    found = true;
                    break;
                }
            }
            if (!found)
                break;
            Ring ring;
            ring.push_back(vertex_of.at(current));
            detail::SnapKey walk = current;
            detail::SnapKey ahead = next_vertex;
            const EdgeKey first_edge = walk < ahead ? EdgeKey{walk, ahead} : EdgeKey{ahead, walk};
            ++used[first_edge];
            while (ahead != start) {
                ring.push_back(vertex_of.at(ahead));
                bool stepped = false;
                for (const auto& nb : adjacency.at(ahead)) {
                    if (nb == walk)
                        continue;
                    const EdgeKey key = ahead < nb ? EdgeKey{ahead, nb} : EdgeKey{nb, ahead};
                    if (used[key] == 0) {
                        ++used[key];
                        walk = ahead;
                        ahead = nb;
                        stepped = true;
                        break;
                    }
                }
                require(stepped, "dissolve: open boundary; shared edges inconsistent "
                                 "beyond snap tolerance");
            }
            ring.push_back(vertex_of.at(start));
            rings.push_back(std::move(ring));
        }
    }
    require(!rings.empty(), "dissolve: no boundary remained");

    // Even containment depth means outer ring, odd means hole.
    std::vector<Ring> normalized;
    for (std::size_t i = 0; i < rings.size(); ++i) {
        int depth = 0;
        for (std::size_t j = 0; j < rings.size(); ++j)
            if (j != i && detail::ring_contains(rings[j], rings[i].front()))
                ++depth;
        normalized.push_back(detail::oriented(rings[i], depth % 2 == 0));
    }

    RegionGeometry region;
    region.id = std::move(id);
    region.rings = std::move(normalized);
    region.perimeter = boundary_length;
    double cx = 0.0;
    double cy = 0.0;
    double total_area = 0.0;
    for (const RegionGeometry& member : members) {
        cx += member.centroid.x * member.area;
        cy += member.centroid.y * member.area;
        total_area += member.area;
    }
    region.area = total_area;
    region.centroid = Point{cx / total_area, cy / total_area};
    return region;
}

} // namespace regionlab
