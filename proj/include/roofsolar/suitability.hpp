// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "roofsolar/grid.hpp"
#include "roofsolar/terrain.hpp"

namespace roofsolar::suitability {

enum class Period { Annual, Monthly };
enum class Preset { Raster2D, Raster3D };

inline constexpr double kAnnualMinRadiation = 800.0;  // kWh/m^2
inline constexpr double kMonthlyMinRadiation = 50.0;  // kWh/m^2
/// Annual cell values above this almost certainly are Wh/m^2, not kWh/m^2.
inline constexpr double kAnnualUnitSanityLimit = 3000.0;

struct SuitabilityCriteria {
    double max_slope_deg = 45.0;
    double flat_slope_deg = 10.0;
    double aspect_min_deg = 22.5;
    double aspect_max_deg = 337.5;
    double min_radiation = kMonthlyMinRadiation;
    Period period = Period::Monthly;
    Preset preset = Preset::Raster3D;

    static SuitabilityCriteria for_period(Period p, Preset preset = Preset::Raster3D) {
        SuitabilityCriteria c;
        c.period = p;
        c.preset = preset;
        c.min_radiation = p == Period::Annual ? kAnnualMinRadiation : kMonthlyMinRadiation;
        return c;
    }

    void validate() const {
        if (!(flat_slope_deg > 0.0 && flat_slope_deg < max_slope_deg && max_slope_deg <= 90.0)) {
            throw InvalidArgument("suitability requires 0 < flat_slope < max_slope <= 90");
        }
        if (!(min_radiation > 0.0)) throw InvalidArgument("minimum radiation must be positive");
        if (!(aspect_min_deg <= aspect_max_deg)) throw InvalidArgument("aspect range is empty");
    }
};

inline Preset parse_preset(std::string_view s) {
    if (s == "2D" || s == "2d") return Preset::Raster2D;
    if (s == "3D" || s == "3d") return Preset::Raster3D;
    throw InvalidArgument("unknown suitability preset '" + std::string(s) + "'");
}

/// Single-cell rule. Under the 2D preset only the radiation threshold applies.
inline bool is_suitable(double radiation_kwh_m2, double slope_deg, double aspect_deg, const SuitabilityCriteria& c) {
    if (!(radiation_kwh_m2 >= c.min_radiation)) return false;
    if (c.preset == Preset::Raster2D) return true;
    if (!(slope_deg <= c.max_slope_deg)) return false;
    if (slope_deg <= c.flat_slope_deg || aspect_deg == terrain::kFlatAspect) return true;
    return aspect_deg >= c.aspect_min_deg && aspect_deg <= c.aspect_max_deg;
}

struct SuitabilityResult {
    Grid mask;  ///< 1 suitable, 0 not, nodata where any input is nodata
    std::size_t suitable_cells = 0;
    std::size_t evaluated_cells = 0;
    /// Annual cells above kAnnualUnitSanityLimit (probable Wh/kWh confusion).
    std::size_t unit_suspect_cells = 0;
};

inline SuitabilityResult suitable_cell_mask(const Grid& radiation_kwh_m2, const Grid& slope, const Grid& aspect,
                                            const SuitabilityCriteria& criteria) {
    criteria.validate();
    require_same_geometry(radiation_kwh_m2.geometry(), slope.geometry(), "suitability: slope");
    require_same_geometry(radiation_kwh_m2.geometry(), aspect.geometry(), "suitability: aspect");
    const double nd = radiation_kwh_m2.nodata();
    SuitabilityResult out{Grid::like(radiation_kwh_m2, nd)};
    for (std::size_t r = 0; r < radiation_kwh_m2.rows(); ++r) {
        for (std::size_t c = 0; c < radiation_kwh_m2.cols(); ++c) {
            if (!radiation_kwh_m2.valid(r, c) || !slope.valid(r, c) || !aspect.valid(r, c)) continue;
            const double rad = radiation_kwh_m2.at(r, c);
            ++out.evaluated_cells;
            if (criteria.period == Period::Annual && rad > kAnnualUnitSanityLimit) ++out.unit_suspect_cells;
            const bool ok = is_suitable(rad, slope.at(r, c), aspect.at(r, c), criteria);
            out.mask.at(r, c) = ok ? 1.0 : 0.0;
            if (ok) ++out.suitable_cells;
        }
    }
    return out;
}

} // namespace roofsolar::suitability
