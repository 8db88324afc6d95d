// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "roofsolar/crs.hpp"
#include "roofsolar/grid.hpp"

namespace roofsolar {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// A closed ring: first and last vertex are equal.
using Ring = std::vector<Point>;

/// Outer ring first, then holes.
struct Polygon {
    std::vector<Ring> rings;
};

struct BuildingFootprint {
    std::string id;
    Polygon polygon;
    std::optional<double> height_m;
    std::map<std::string, std::string> attributes;
    bool synthesized_id = false;
};

/// Diagnostics gathered while reading a footprint file.
struct FootprintReport {
    std::size_t features = 0;
    std::size_t skipped_geometry = 0;
    std::size_t invalid_rings = 0;
    std::size_t synthesized_ids = 0;
    std::size_t duplicate_ids = 0;
    std::size_t closed_rings = 0;
};

struct FootprintSet {
    std::string crs_id;
    std::vector<BuildingFootprint> footprints;
    FootprintReport report;
};

namespace geom {

inline double ring_signed_area(const Ring& r) {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) a += r[i].x * r[i + 1].y - r[i + 1].x * r[i].y;
    return 0.5 * a;
}

/// Outer area minus holes.
inline double polygon_area(const Polygon& p) {
    if (p.rings.empty()) return 0.0;
    double a = std::abs(ring_signed_area(p.rings.front()));
    for (std::size_t i = 1; i < p.rings.size(); ++i) a -= std::abs(ring_signed_area(p.rings[i]));
    return std::max(a, 0.0);
}

/// Area centroid of the polygon, holes subtracted.
inline Point polygon_centroid(const Polygon& p) {
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t k = 0; k < p.rings.size(); ++k) {
        const Ring& r = p.rings[k];
        const double orient = ring_signed_area(r) < 0 ? -1.0 : 1.0;
        const double sign = (k == 0 ? 1.0 : -1.0) * orient;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            const double cross = r[i].x * r[i + 1].y - r[i + 1].x * r[i].y;
            a += sign * cross;
            cx += sign * (r[i].x + r[i + 1].x) * cross;
            cy += sign * (r[i].y + r[i + 1].y) * cross;
        }
    }
    if (a == 0.0) return p.rings.empty() || p.rings[0].empty() ? Point{} : p.rings[0][0];
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

/// Even-odd rule across all rings, so holes are excluded.
inline bool contains(const Polygon& p, double x, double y) {
    bool inside = false;
    for (const Ring& r : p.rings) {
        for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
            const Point& a = r[i];
            const Point& b = r[j];
            if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) inside = !inside;
        }
    }
    return inside;
}

inline double orient(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

/// Proper crossings between non-adjacent edges of a closed ring.
inline bool is_simple(const Ring& r) {
    const std::size_t n = r.size() - 1;
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_cross(r[i], r[i + 1], r[j], r[j + 1])) return false;
        }
    }
    return true;
}

struct Bounds {
    double min_x, min_y, max_x, max_y;
};

inline Bounds bounds(const Polygon& p) {
    Bounds b{INFINITY, INFINITY, -INFINITY, -INFINITY};
    for (const Ring& r : p.rings)
        for (const Point& q : r) {
            b.min_x = std::min(b.min_x, q.x);
            b.min_y = std::min(b.min_y, q.y);
            b.max_x = std::max(b.max_x, q.x);
            b.max_y = std::max(b.max_y, q.y);
        }
    return b;
}

} // namespace geom

namespace detail {

inline std::string property_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_null()) return {};
    return v.dump();
}

inline std::optional<Ring> parse_ring(const nlohmann::json& coords, FootprintReport& report) {
    if (!coords.is_array()) return std::nullopt;
    Ring ring;
    for (const auto& c : coords) {
        if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) return std::nullopt;
        ring.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    if (ring.size() < 3) return std::nullopt;
    if (!(ring.front() == ring.back())) {
        ring.push_back(ring.front());
        ++report.closed_rings;
    }
    if (!geom::is_simple(ring)) return std::nullopt;
    return ring;
}

inline std::optional<Polygon> parse_polygon(const nlohmann::json& coords, FootprintReport& report) {
    if (!coords.is_array() || coords.empty()) return std::nullopt;
    Polygon poly;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        auto ring = parse_ring(coords[i], report);
        if (!ring) {
            if (i == 0) return std::nullopt;
            ++report.invalid_rings;
            continue;
        }
        poly.rings.push_back(std::move(*ring));
    }
    return poly;
}

} // namespace detail

/// Parses a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
/// Each polygon part becomes one footprint; MultiPolygon parts share the
/// feature id with a "#k" suffix. Features without `osm_id` / `uid` get
/// their file-order index as id and are flagged.
inline FootprintSet parse_footprints(const nlohmann::json& doc, const std::string& source = "footprints") {
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array()) {
        throw FormatError(source + ": not a GeoJSON FeatureCollection");
    }
    FootprintSet set;
    set.crs_id = "EPSG:4326";
    if (doc.contains("crs") && doc["crs"].is_object()) {
        const auto& c = doc["crs"];
        if (c.contains("properties") && c["properties"].contains("name")) {
            set.crs_id = crs::normalize(c["properties"]["name"].get<std::string>());
        }
    }
    std::set<std::string> seen;
    auto unique_id = [&](std::string id) {
        if (seen.insert(id).second) return id;
        ++set.report.duplicate_ids;
        for (int k = 2;; ++k) {
            std::string candidate = id + "~" + std::to_string(k);
            if (seen.insert(candidate).second) return candidate;
        }
    };

    const auto& features = doc["features"];
    for (std::size_t index = 0; index < features.size(); ++index) {
        const auto& f = features[index];
        ++set.report.features;
        if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object()) {
            ++set.report.skipped_geometry;
            continue;
        }
        const auto& g = f["geometry"];
        const std::string type = g.value("type", "");
        std::vector<Polygon> parts;
        if (type == "Polygon" && g.contains("coordinates")) {
            if (auto p = detail::parse_polygon(g["coordinates"], set.report)) parts.push_back(std::move(*p));
        } else if (type == "MultiPolygon" && g.contains("coordinates") && g["coordinates"].is_array()) {
            for (const auto& pc : g["coordinates"]) {
                if (auto p = detail::parse_polygon(pc, set.report)) parts.push_back(std::move(*p));
            }
        }
        if (parts.empty()) {
            ++set.report.skipped_geometry;
            continue;
        }

        BuildingFootprint base;
        const nlohmann::json props = f.contains("properties") && f["properties"].is_object() ? f["properties"]
                                                                                              : nlohmann::json::object();
        for (const auto& [k, v] : props.items()) base.attributes[k] = detail::property_text(v);
        if (props.contains("osm_id") && !props["osm_id"].is_null()) base.id = detail::property_text(props["osm_id"]);
        else if (props.contains("uid") && !props["uid"].is_null()) base.id = detail::property_text(props["uid"]);
        if (base.id.empty()) {
            base.id = std::to_string(index);
            base.synthesized_id = true;
            ++set.report.synthesized_ids;
        }
        if (props.contains("height_m") && props["height_m"].is_number()) base.height_m = props["height_m"].get<double>();

        const bool multi = type == "MultiPolygon";
        for (std::size_t k = 0; k < parts.size(); ++k) {
            BuildingFootprint fp = base;
            fp.polygon = std::move(parts[k]);
            fp.id = unique_id(multi ? base.id + "#" + std::to_string(k) : base.id);
            set.footprints.push_back(std::move(fp));
        }
    }
    return set;
}

inline FootprintSet read_footprints(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path.string() + ": cannot open");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": invalid JSON: " + e.what());
    }
    return parse_footprints(doc, path.string());
}

/// Labels every cell whose center lies inside a footprint. Footprint `i`
/// gets label `i + 1`; where footprints overlap the later one wins and the
/// cell is counted in `overlapping_cells`.
inline ZoneGrid rasterize_zones(const FootprintSet& set, const GridGeometry& reference) {
    if (!crs::compatible(set.crs_id, reference.crs_id)) {
        throw GeometryMismatch("rasterize_zones: footprint CRS " + set.crs_id + " does not match raster CRS " +
                               reference.crs_id);
    }
    ZoneGrid zones;
    zones.geometry = reference;
    zones.labels.assign(reference.size(), 0);
    zones.ids.reserve(set.footprints.size());
    const double cs = reference.cell_size;
    for (std::size_t i = 0; i < set.footprints.size(); ++i) {
        const auto& fp = set.footprints[i];
        zones.ids.push_back(fp.id);
        const auto label = static_cast<std::int32_t>(i + 1);
        const geom::Bounds b = geom::bounds(fp.polygon);
        // Candidate columns/rows whose centers fall inside the bounding box.
        const double c0 = std::ceil((b.min_x - reference.origin_x) / cs - 0.5);
        const double c1 = std::floor((b.max_x - reference.origin_x) / cs - 0.5);
        const double r0 = std::ceil((reference.origin_y - b.max_y) / cs - 0.5);
        const double r1 = std::floor((reference.origin_y - b.min_y) / cs - 0.5);
        const double max_c = static_cast<double>(reference.cols) - 1, max_r = static_cast<double>(reference.rows) - 1;
        if (c1 < 0 || r1 < 0 || c0 > max_c || r0 > max_r) continue;
        const auto cb = static_cast<std::size_t>(std::max(c0, 0.0)), ce = static_cast<std::size_t>(std::min(c1, max_c));
        const auto rb = static_cast<std::size_t>(std::max(r0, 0.0)), re = static_cast<std::size_t>(std::min(r1, max_r));
        for (std::size_t r = rb; r <= re; ++r) {
            const double y = reference.center_y(r);
            for (std::size_t c = cb; c <= ce; ++c) {
                if (!geom::contains(fp.polygon, reference.center_x(c), y)) continue;
                auto& cell = zones.labels[r * reference.cols + c];
                if (cell != 0) ++zones.overlapping_cells;
                cell = label;
            }
        }
    }
    return zones;
}

} // namespace roofsolar
