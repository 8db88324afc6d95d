// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-building aggregation, area filtering, usable electricity and ranking.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roofsolar/crs.hpp"
#include "roofsolar/footprints.hpp"
#include "roofsolar/grid.hpp"

namespace roofsolar::power {

inline constexpr double kSquareFeetToSquareMeters = 0.09290304;
/// 1500 ft^2.
inline constexpr double kMinBuildingAreaM2 = 1500.0 * kSquareFeetToSquareMeters;
inline constexpr double kPanelYield = 0.15;
inline constexpr double kPerformanceRatio = 0.8;

struct ZoneStat {
    std::int32_t zone = 0;
    std::size_t count = 0;
    double area_m2 = 0.0;
    std::optional<double> mean;
};

/// Per-zone count / area / mean over cells that are inside the mask (value 1)
/// and hold data. Every zone of `zones` is reported, including empty ones.
inline std::vector<ZoneStat> zonal_stats(const Grid& value, const ZoneGrid& zones, const Grid* mask = nullptr) {
    require_same_geometry(value.geometry(), zones.geometry, "zonal_stats: zones");
    if (mask) require_same_geometry(value.geometry(), mask->geometry(), "zonal_stats: mask");
    const std::size_t n = zones.zone_count();
    std::vector<std::size_t> counts(n + 1, 0);
    std::vector<double> sums(n + 1, 0.0);
    for (std::size_t i = 0; i < value.geometry().size(); ++i) {
        const std::int32_t z = zones.labels[i];
        if (z <= 0 || static_cast<std::size_t>(z) > n) continue;
        const double v = value.values()[i];
        if (value.is_nodata(v)) continue;
        if (mask) {
            const double m = mask->values()[i];
            if (mask->is_nodata(m) || m != 1.0) continue;
        }
        ++counts[z];
        sums[z] += v;
    }
    std::vector<ZoneStat> out;
    out.reserve(n);
    const double cell_area = value.geometry().cell_area();
    for (std::size_t z = 1; z <= n; ++z) {
        ZoneStat s;
        s.zone = static_cast<std::int32_t>(z);
        s.count = counts[z];
        s.area_m2 = static_cast<double>(counts[z]) * cell_area;
        if (counts[z] > 0) s.mean = sums[z] / static_cast<double>(counts[z]);
        out.push_back(s);
    }
    return out;
}

/// E = A * H * r * PR, kWh.
inline double usable_electricity(double area_m2, double radiation_kwh_m2, double panel_yield = kPanelYield,
                                 double performance_ratio = kPerformanceRatio) {
    if (area_m2 < 0 || radiation_kwh_m2 < 0 || panel_yield < 0 || performance_ratio < 0 || panel_yield > 1 ||
        performance_ratio > 1) {
        throw InvalidArgument("usable_electricity: inputs must be non-negative and r, PR <= 1");
    }
    return area_m2 * radiation_kwh_m2 * panel_yield * performance_ratio;
}

enum class AreaBasis { Suitable, Footprint };

inline AreaBasis parse_area_basis(std::string_view s) {
    if (s == "suitable") return AreaBasis::Suitable;
    if (s == "footprint") return AreaBasis::Footprint;
    throw InvalidArgument("unknown area basis '" + std::string(s) + "' (expected suitable|footprint)");
}

struct PowerParams {
    double panel_yield = kPanelYield;
    double performance_ratio = kPerformanceRatio;
    double min_area_m2 = kMinBuildingAreaM2;
    AreaBasis area_basis = AreaBasis::Suitable;
};

struct BuildingSolarRecord {
    std::string building_id;
    std::optional<double> height_m;
    double footprint_area_m2 = 0.0;
    std::size_t suitable_count = 0;
    double suitable_area_m2 = 0.0;
    std::optional<double> mean_radiation_kwh_m2;
    double usable_electricity_kwh = 0.0;
    std::optional<crs::LonLat> centroid;
};

/// One record per footprint, joined to its zone statistics by label.
inline std::vector<BuildingSolarRecord> building_records(const FootprintSet& footprints, const ZoneGrid& zones,
                                                         const std::vector<ZoneStat>& stats, const PowerParams& params) {
    if (zones.zone_count() != footprints.footprints.size()) {
        throw InvalidArgument("zone grid does not belong to this footprint set");
    }
    std::vector<BuildingSolarRecord> out;
    out.reserve(footprints.footprints.size());
    for (std::size_t i = 0; i < footprints.footprints.size(); ++i) {
        const auto& fp = footprints.footprints[i];
        BuildingSolarRecord rec;
        rec.building_id = fp.id;
        rec.height_m = fp.height_m;
        rec.footprint_area_m2 = geom::polygon_area(fp.polygon);
        const Point c = geom::polygon_centroid(fp.polygon);
        rec.centroid = crs::to_lon_lat(footprints.crs_id, c.x, c.y);
        if (i < stats.size()) {
            rec.suitable_count = stats[i].count;
            rec.suitable_area_m2 = stats[i].area_m2;
            rec.mean_radiation_kwh_m2 = stats[i].mean;
        }
        if (rec.suitable_count > 0 && rec.mean_radiation_kwh_m2) {
            const double area = params.area_basis == AreaBasis::Suitable ? rec.suitable_area_m2 : rec.footprint_area_m2;
            rec.usable_electricity_kwh =
                usable_electricity(area, *rec.mean_radiation_kwh_m2, params.panel_yield, params.performance_ratio);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

/// Keeps buildings whose footprint area is at least `min_area_m2`.
inline std::vector<BuildingSolarRecord> building_filter(const std::vector<BuildingSolarRecord>& records,
                                                        double min_area_m2 = kMinBuildingAreaM2) {
    std::vector<BuildingSolarRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const BuildingSolarRecord& r) { return r.footprint_area_m2 >= min_area_m2; });
    return out;
}

/// Highest usable electricity first; ties by building id.
inline std::vector<BuildingSolarRecord> rank_top_n(std::vector<BuildingSolarRecord> records, std::size_t n) {
    if (n < 1) throw InvalidArgument("rank_top_n needs n >= 1");
    std::sort(records.begin(), records.end(), [](const BuildingSolarRecord& a, const BuildingSolarRecord& b) {
        if (a.usable_electricity_kwh != b.usable_electricity_kwh) return a.usable_electricity_kwh > b.usable_electricity_kwh;
        return a.building_id < b.building_id;
    });
    if (records.size() > n) records.resize(n);
    return records;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

} // namespace detail

inline void write_records_csv(std::ostream& out, const std::vector<BuildingSolarRecord>& records) {
    out << "building_id,height_m,footprint_area_m2,suitable_count,suitable_area_m2,mean_radiation_kwh_m2,"
           "usable_electricity_kwh,lon,lat\n";
    for (const auto& r : records) {
        out << detail::csv_field(r.building_id) << ',' << (r.height_m ? detail::fixed(*r.height_m, 2) : "") << ','
            << detail::fixed(r.footprint_area_m2, 3) << ',' << r.suitable_count << ','
            << detail::fixed(r.suitable_area_m2, 3) << ','
            << (r.mean_radiation_kwh_m2 ? detail::fixed(*r.mean_radiation_kwh_m2, 4) : "") << ','
            << detail::fixed(r.usable_electricity_kwh, 3) << ','
            << (r.centroid ? detail::fixed(r.centroid->lon, 7) : "") << ','
            << (r.centroid ? detail::fixed(r.centroid->lat, 7) : "") << '\n';
    }
}

/// Point features at building centroids, same properties as the CSV.
inline nlohmann::json records_geojson(const std::vector<BuildingSolarRecord>& records) {
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        nlohmann::json props = {
            {"rank", i + 1},
            {"building_id", r.building_id},
            {"height_m", r.height_m ? nlohmann::json(*r.height_m) : nlohmann::json()},
            {"footprint_area_m2", r.footprint_area_m2},
            {"suitable_count", r.suitable_count},
            {"suitable_area_m2", r.suitable_area_m2},
            {"mean_radiation_kwh_m2", r.mean_radiation_kwh_m2 ? nlohmann::json(*r.mean_radiation_kwh_m2) : nlohmann::json()},
            {"usable_electricity_kwh", r.usable_electricity_kwh},
            {"lon", r.centroid ? nlohmann::json(r.centroid->lon) : nlohmann::json()},
            {"lat", r.centroid ? nlohmann::json(r.centroid->lat) : nlohmann::json()},
        };
        nlohmann::json geometry =
            r.centroid ? nlohmann::json{{"type", "Point"}, {"coordinates", {r.centroid->lon, r.centroid->lat}}} : nlohmann::json();
        features.push_back({{"type", "Feature"}, {"properties", props}, {"geometry", geometry}});
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

} // namespace roofsolar::power
