// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "roofsolar/grid.hpp"
#include "roofsolar/parallel.hpp"

namespace roofsolar::terrain {

inline constexpr double kFlatAspect = -1.0;
inline constexpr double kFlatGradient = 1e-8;

struct TerrainDerivatives {
    Grid slope_deg;
    Grid aspect_deg;
};

/// Surface gradient in elevation units per map unit; x grows east, y grows north.
struct Gradient {
    double east = 0.0;
    double north = 0.0;
};

namespace detail {

inline void check_window(const Grid& dem, int window) {
    if (window % 2 == 0) throw InvalidArgument("terrain window must be odd, got " + std::to_string(window));
    if (window < 3 || window > 15) throw InvalidArgument("terrain window must be within 3..15");
    if (dem.rows() < static_cast<std::size_t>(window) || dem.cols() < static_cast<std::size_t>(window)) {
        throw InvalidArgument("DEM smaller than the terrain window");
    }
}

// One directional estimate along an axis. `at(k)` returns the elevation at
// signed offset k along the axis (NaN when unavailable). Central difference
// when both ends exist, one-sided against the axis origin otherwise.
template <typename At>
bool axis_difference(At&& at, int k, double cs, double& out) {
    const double plus = at(k), minus = at(-k);
    if (!std::isnan(plus) && !std::isnan(minus)) {
        out = (plus - minus) / (2.0 * k * cs);
        return true;
    }
    const double mid = at(0);
    if (std::isnan(mid)) return false;
    if (!std::isnan(plus)) {
        out = (plus - mid) / (k * cs);
        return true;
    }
    if (!std::isnan(minus)) {
        out = (mid - minus) / (k * cs);
        return true;
    }
    return false;
}

} // namespace detail

/// Weighted central differences over a `window` x `window` neighbourhood.
/// For window 3 the weights are Horn's (1, 2, 1); wider windows use a tent
/// falling off with the perpendicular offset. Terms touching nodata or the
/// raster edge fall back to one-sided differences or are dropped, and the
/// remaining weights are renormalized. Returns false when no estimate exists.
inline bool gradient_at(const Grid& dem, std::size_t row, std::size_t col, int window, Gradient& g) {
    if (!dem.valid(row, col)) return false;
    const int half = window / 2;
    const double cs = dem.cell_size();
    const auto rows = static_cast<long>(dem.rows()), cols = static_cast<long>(dem.cols());
    auto sample = [&](long r, long c) {
        if (r < 0 || c < 0 || r >= rows || c >= cols) return std::numeric_limits<double>::quiet_NaN();
        const double v = dem.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        return dem.is_nodata(v) ? std::numeric_limits<double>::quiet_NaN() : v;
    };
    const long r0 = static_cast<long>(row), c0 = static_cast<long>(col);
    double sx = 0, wx = 0, sy = 0, wy = 0;
    for (int perp = -half; perp <= half; ++perp) {
        const double w = half + 1 - std::abs(perp);
        for (int k = 1; k <= half; ++k) {
            double d;
            if (detail::axis_difference([&](int o) { return sample(r0 + perp, c0 + o); }, k, cs, d)) {
                sx += w * d;
                wx += w;
            }
            // Row index grows southward, so north is a negative row offset.
            if (detail::axis_difference([&](int o) { return sample(r0 - o, c0 + perp); }, k, cs, d)) {
                sy += w * d;
                wy += w;
            }
        }
    }
    if (wx == 0.0 || wy == 0.0) return false;
    g.east = sx / wx;
    g.north = sy / wy;
    return true;
}

inline double slope_from_gradient(const Gradient& g) {
    return std::atan(std::hypot(g.east, g.north)) * 180.0 / std::numbers::pi;
}

/// Compass direction of steepest descent, degrees clockwise from north, or
/// kFlatAspect for a (numerically) flat surface.
inline double aspect_from_gradient(const Gradient& g) {
    if (std::hypot(g.east, g.north) < kFlatGradient) return kFlatAspect;
    double a = std::atan2(-g.east, -g.north) * 180.0 / std::numbers::pi;
    if (a < 0) a += 360.0;
    if (a >= 360.0) a -= 360.0;
    return a;
}

inline TerrainDerivatives derivatives(const Grid& dem, int window = 3, unsigned workers = 1) {
    detail::check_window(dem, window);
    TerrainDerivatives out{Grid::like(dem, dem.nodata()), Grid::like(dem, dem.nodata())};
    parallel_rows(dem.rows(), workers, [&](std::size_t rb, std::size_t re) {
        for (std::size_t r = rb; r < re; ++r) {
            for (std::size_t c = 0; c < dem.cols(); ++c) {
                Gradient g;
                if (!gradient_at(dem, r, c, window, g)) continue;
                out.slope_deg.at(r, c) = slope_from_gradient(g);
                out.aspect_deg.at(r, c) = aspect_from_gradient(g);
            }
        }
    });
    return out;
}

inline Grid slope(const Grid& dem, int window = 3, unsigned workers = 1) {
    return derivatives(dem, window, workers).slope_deg;
}

inline Grid aspect(const Grid& dem, int window = 3, unsigned workers = 1) {
    return derivatives(dem, window, workers).aspect_deg;
}

} // namespace roofsolar::terrain
