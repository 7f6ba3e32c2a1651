#pragma once

#include <set>
#include <string>
#include <vector>

#include "regionlab/geometry.hpp"
#include "regionlab/jsonio.hpp"

namespace regionlab {

namespace detail {

inline Ring parse_ring(const json& coordinates, const std::string& id) {
    Ring ring;
    for (const auto& pair : coordinates) {
        require(pair.is_array() && pair.size() >= 2,
                "feature '", id, "': ring coordinate is not an [x, y] pair");
        ring.push_back(Point{pair[0].get<double>(), pair[1].get<double>()});
    }
    return ring;
}

inline PolygonPart parse_polygon(const json& rings, const std::string& id) {
    require(rings.is_array() && !rings.empty(), "feature '", id, "': empty polygon");
    PolygonPart part;
    part.outer = parse_ring(rings[0], id);
    for (std::size_t i = 1; i < rings.size(); ++i)
        part.holes.push_back(parse_ring(rings[i], id));
    return part;
}

inline std::string feature_id(const json& feature) {
    // RFC 7946 allows a feature-level "id"; we also accept properties.id.
    if (feature.contains("id"))
        return feature["id"].is_string() ? feature["id"].get<std::string>()
                                         : feature["id"].dump();
    if (feature.contains("properties") && feature["properties"].is_object() &&
        feature["properties"].contains("id")) {
        const auto& raw = feature["properties"]["id"];
        return raw.is_string() ? raw.get<std::string>() : raw.dump();
    }
    fail("GeoJSON feature without an id property");
}

} // namespace detail

inline std::vector<RegionGeometry> parse_geojson(const json& root) {
    require(root.is_object() && root.value("type", "") == "FeatureCollection",
            "GeoJSON root must be a FeatureCollection");
    require(root.contains("features") && root["features"].is_array(),
            "FeatureCollection without features array");
    std::vector<RegionGeometry> regions;
    std::set<std::string> seen;
    for (const auto& feature : root["features"]) {
        const std::string id = detail::feature_id(feature);
        require(seen.insert(id).second, "duplicate feature id '", id, "'");
        std::string name = id;
        if (feature.contains("properties") && feature["properties"].is_object())
            name = feature["properties"].value("name", id);
        require(feature.contains("geometry") && feature["geometry"].is_object(),
                "feature '", id, "': missing geometry");
        const auto& geometry = feature["geometry"];
        const std::string type = geometry.value("type", "");
        std::vector<PolygonPart> parts;
        if (type == "Polygon") {
            parts.push_back(detail::parse_polygon(geometry["coordinates"], id));
        } else if (type == "MultiPolygon") {
            for (const auto& polygon : geometry["coordinates"])
                parts.push_back(detail::parse_polygon(polygon, id));
        } else {
            fail("feature '", id, "': unsupported geometry type '", type, "'");
        }
        regions.push_back(make_region(ProvinceId{id, name}, parts));
    }
    require(regions.size() >= 1, "FeatureCollection has no features");
    return regions;
}

/// Loads a GeoJSON FeatureCollection of Polygon/MultiPolygon features.
inline std::vector<RegionGeometry> load_geometry(const std::string& path) {
    return parse_geojson(read_json(path));
}

inline json to_geojson(const std::vector<RegionGeometry>& regions) {
    json features = json::array();
    for (const RegionGeometry& region : regions) {
        json rings = json::array();
        for (const Ring& ring : region.rings) {
            json coords = json::array();
            for (const Point& p : ring)
                coords.push_back(json::array({round12(p.x), round12(p.y)}));
            rings.push_back(std::move(coords));
        }
        features.push_back({{"type", "Feature"},
                            {"properties", {{"id", region.id.id}, {"name", region.id.name}}},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", std::move(rings)}}}});
    }
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline void write_geojson(const std::string& path, const std::vector<RegionGeometry>& regions) {
    write_json(path, to_geojson(regions));
}

} // namespace regionlab
