// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace roofsolar::crs {

/// Geographic coordinate in degrees.
struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
};

/// Extracts the EPSG code from identifiers such as "EPSG:32643",
/// "urn:ogc:def:crs:EPSG::32643" or "OGC:CRS84".
inline std::optional<int> epsg_code(std::string_view id) {
    std::string upper(id);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper.find("CRS84") != std::string::npos) return 4326;
    auto pos = upper.rfind("EPSG");
    if (pos == std::string::npos) return std::nullopt;
    pos += 4;
    while (pos < upper.size() && (upper[pos] == ':' || upper[pos] == ' ')) ++pos;
    if (pos >= upper.size() || !std::isdigit(static_cast<unsigned char>(upper[pos]))) return std::nullopt;
    int code = 0;
    while (pos < upper.size() && std::isdigit(static_cast<unsigned char>(upper[pos]))) {
        code = code * 10 + (upper[pos] - '0');
        ++pos;
    }
    return code;
}

/// Canonical "EPSG:n" form when an EPSG code is recognizable, else the input.
inline std::string normalize(std::string_view id) {
    if (auto code = epsg_code(id)) return "EPSG:" + std::to_string(*code);
    return std::string(id);
}

/// True unless both identifiers are known and differ.
inline bool compatible(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) return true;
    return normalize(a) == normalize(b);
}

struct UtmZone {
    int zone = 0;
    bool north = true;
};

/// WGS84 UTM zones (EPSG 326zz / 327zz).
inline std::optional<UtmZone> utm_zone(std::string_view id) {
    auto code = epsg_code(id);
    if (!code) return std::nullopt;
    if (*code >= 32601 && *code <= 32660) return UtmZone{*code - 32600, true};
    if (*code >= 32701 && *code <= 32760) return UtmZone{*code - 32700, false};
    return std::nullopt;
}

inline bool is_geographic(std::string_view id) {
    auto code = epsg_code(id);
    return code && (*code == 4326 || *code == 4979);
}

namespace detail {
inline constexpr double kA = 6378137.0;
inline constexpr double kF = 1.0 / 298.257223563;
inline constexpr double kE2 = kF * (2.0 - kF);
inline constexpr double kEp2 = kE2 / (1.0 - kE2);
inline constexpr double kK0 = 0.9996;
inline constexpr double kDeg = std::numbers::pi / 180.0;

inline double central_meridian(int zone) { return (zone - 1) * 6.0 - 180.0 + 3.0; }
} // namespace detail

/// Transverse Mercator series (Snyder), WGS84 ellipsoid.
inline std::pair<double, double> utm_forward(const UtmZone& z, LonLat p) {
    using namespace detail;
    const double phi = p.lat * kDeg;
    const double dlam = (p.lon - central_meridian(z.zone)) * kDeg;
    const double s = std::sin(phi), c = std::cos(phi), t = std::tan(phi);
    const double n = kA / std::sqrt(1.0 - kE2 * s * s);
    const double tt = t * t;
    const double cc = kEp2 * c * c;
    const double a = dlam * c;
    const double e4 = kE2 * kE2, e6 = e4 * kE2;
    const double m = kA * ((1 - kE2 / 4 - 3 * e4 / 64 - 5 * e6 / 256) * phi -
                           (3 * kE2 / 8 + 3 * e4 / 32 + 45 * e6 / 1024) * std::sin(2 * phi) +
                           (15 * e4 / 256 + 45 * e6 / 1024) * std::sin(4 * phi) - (35 * e6 / 3072) * std::sin(6 * phi));
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a, a6 = a5 * a;
    const double easting =
        kK0 * n * (a + (1 - tt + cc) * a3 / 6 + (5 - 18 * tt + tt * tt + 72 * cc - 58 * kEp2) * a5 / 120) + 500000.0;
    double northing = kK0 * (m + n * t *
                                     (a2 / 2 + (5 - tt + 9 * cc + 4 * cc * cc) * a4 / 24 +
                                      (61 - 58 * tt + tt * tt + 600 * cc - 330 * kEp2) * a6 / 720));
    if (!z.north) northing += 10000000.0;
    return {easting, northing};
}

inline LonLat utm_inverse(const UtmZone& z, double easting, double northing) {
    using namespace detail;
    const double x = easting - 500000.0;
    const double y = z.north ? northing : northing - 10000000.0;
    const double e4 = kE2 * kE2, e6 = e4 * kE2;
    const double mu = y / kK0 / (kA * (1 - kE2 / 4 - 3 * e4 / 64 - 5 * e6 / 256));
    const double e1 = (1 - std::sqrt(1 - kE2)) / (1 + std::sqrt(1 - kE2));
    const double phi1 = mu + (3 * e1 / 2 - 27 * std::pow(e1, 3) / 32) * std::sin(2 * mu) +
                        (21 * e1 * e1 / 16 - 55 * std::pow(e1, 4) / 32) * std::sin(4 * mu) +
                        (151 * std::pow(e1, 3) / 96) * std::sin(6 * mu) + (1097 * std::pow(e1, 4) / 512) * std::sin(8 * mu);
    const double s = std::sin(phi1), c = std::cos(phi1), t = std::tan(phi1);
    const double c1 = kEp2 * c * c;
    const double t1 = t * t;
    const double n1 = kA / std::sqrt(1 - kE2 * s * s);
    const double r1 = kA * (1 - kE2) / std::pow(1 - kE2 * s * s, 1.5);
    const double d = x / (n1 * kK0);
    const double d2 = d * d, d3 = d2 * d, d4 = d3 * d, d5 = d4 * d, d6 = d5 * d;
    const double lat = phi1 - (n1 * t / r1) *
                                  (d2 / 2 - (5 + 3 * t1 + 10 * c1 - 4 * c1 * c1 - 9 * kEp2) * d4 / 24 +
                                   (61 + 90 * t1 + 298 * c1 + 45 * t1 * t1 - 252 * kEp2 - 3 * c1 * c1) * d6 / 720);
    const double lon = (d - (1 + 2 * t1 + c1) * d3 / 6 +
                        (5 - 2 * c1 + 28 * t1 - 3 * c1 * c1 + 8 * kEp2 + 24 * t1 * t1) * d5 / 120) /
                       c;
    return {central_meridian(z.zone) + lon / kDeg, lat / kDeg};
}

/// Geographic position of a map coordinate, when the CRS is one we can invert.
inline std::optional<LonLat> to_lon_lat(std::string_view crs_id, double x, double y) {
    if (is_geographic(crs_id)) return LonLat{x, y};
    if (auto zone = utm_zone(crs_id)) return utm_inverse(*zone, x, y);
    return std::nullopt;
}

} // namespace roofsolar::crs
