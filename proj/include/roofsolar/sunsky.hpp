// SPDX-License-Identifier: Apache-2.0
#pragma once

// Solar geometry and the hemispherical sun / sky maps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "roofsolar/grid.hpp"

namespace roofsolar::sunsky {

inline constexpr double kDeg = std::numbers::pi / 180.0;
inline constexpr double kMaxLatitude = 66.0;

inline constexpr std::array<int, 12> kDaysInMonth = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
inline constexpr int kRepresentativeDay = 15;

/// Day of year in a non-leap year.
inline int day_of_year(int month, int day) {
    if (month < 1 || month > 12) throw InvalidArgument("month must be within 1..12");
    if (day < 1 || day > kDaysInMonth[month - 1]) throw InvalidArgument("day outside month");
    int doy = day;
    for (int m = 1; m < month; ++m) doy += kDaysInMonth[m - 1];
    return doy;
}

inline double spencer_angle(int day_of_year) { return 2.0 * std::numbers::pi * (day_of_year - 1) / 365.0; }

/// Spencer (1971) Fourier series, degrees.
inline double solar_declination(int day_of_year) {
    const double g = spencer_angle(day_of_year);
    const double rad = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) - 0.006758 * std::cos(2 * g) +
                       0.000907 * std::sin(2 * g) - 0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
    return rad / kDeg;
}

/// Equation of time in minutes (Spencer).
inline double equation_of_time_min(int day_of_year) {
    const double g = spencer_angle(day_of_year);
    return 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) - 0.014615 * std::cos(2 * g) -
                     0.040849 * std::sin(2 * g));
}

struct SolarPosition {
    double zenith_deg = 0.0;
    double azimuth_deg = 0.0; ///< clockwise from north, [0, 360)
};

/// Sun position for local apparent solar time. A zenith above 90 degrees
/// means the sun is below the horizon.
inline SolarPosition solar_position(double latitude_deg, int day_of_year, double solar_time_h) {
    const double phi = latitude_deg * kDeg;
    const double delta = solar_declination(day_of_year) * kDeg;
    const double h = 15.0 * (solar_time_h - 12.0) * kDeg;
    const double cz = std::sin(phi) * std::sin(delta) + std::cos(phi) * std::cos(delta) * std::cos(h);
    SolarPosition p;
    p.zenith_deg = std::acos(std::clamp(cz, -1.0, 1.0)) / kDeg;
    const double east = -std::sin(h) * std::cos(delta);
    const double north = std::cos(phi) * std::sin(delta) - std::sin(phi) * std::cos(delta) * std::cos(h);
    double az = std::atan2(east, north) / kDeg;
    if (az < 0) az += 360.0;
    if (az >= 360.0) az -= 360.0;
    p.azimuth_deg = az;
    return p;
}

/// Converts clock time to solar time when sample times are meant as local
/// standard time rather than solar time.
struct ClockCorrection {
    double longitude_deg = 0.0;
    double utc_offset_h = 0.0;

    double solar_time(int day_of_year, double clock_h) const {
        return clock_h + (4.0 * (longitude_deg - 15.0 * utc_offset_h) + equation_of_time_min(day_of_year)) / 60.0;
    }
};

enum class TimeMode { Annual, Month, Day };

struct TimeConfig {
    TimeMode mode = TimeMode::Month;
    int month = 1;  ///< Month and Day modes
    int day = kRepresentativeDay;  ///< Day mode only
    double hour_interval_h = 0.5;
    /// 0 = one representative day (the 15th) per month; N > 0 samples every Nth day.
    int day_step = 0;
    std::optional<ClockCorrection> clock;

    void validate() const {
        if (!(hour_interval_h > 0.0) || hour_interval_h > 2.0) throw InvalidArgument("hour interval must be in (0, 2]");
        if (mode != TimeMode::Annual && (month < 1 || month > 12)) throw InvalidArgument("month must be within 1..12");
        if (mode == TimeMode::Day) day_of_year(month, day);
        if (day_step < 0) throw InvalidArgument("day step must be non-negative");
    }
};

/// One simulated day and the number of calendar days it stands for.
struct SampledDay {
    int month = 1;
    int day_of_year = 1;
    double weight_days = 1.0;
};

inline std::vector<SampledDay> sampled_days(const TimeConfig& config) {
    config.validate();
    std::vector<SampledDay> days;
    auto add_month = [&](int m) {
        const int dim = kDaysInMonth[m - 1];
        if (config.day_step == 0) {
            days.push_back({m, day_of_year(m, kRepresentativeDay), static_cast<double>(dim)});
            return;
        }
        for (int d = 1; d <= dim; d += config.day_step) {
            days.push_back({m, day_of_year(m, d), static_cast<double>(std::min(config.day_step, dim - d + 1))});
        }
    };
    switch (config.mode) {
    case TimeMode::Day:
        days.push_back({config.month, day_of_year(config.month, config.day), 1.0});
        break;
    case TimeMode::Month:
        add_month(config.month);
        break;
    case TimeMode::Annual:
        for (int m = 1; m <= 12; ++m) add_month(m);
        break;
    }
    return days;
}

/// Zenith / azimuth extent of a hemisphere sector, degrees.
struct SectorBounds {
    double zenith_lo = 0.0;
    double zenith_hi = 90.0;
    double azimuth_lo = 0.0;
    double azimuth_hi = 360.0;
};

/// Regular equal-angle partition of the upper hemisphere.
struct Partition {
    std::size_t n_zenith = 8;
    std::size_t n_azimuth = 16;

    std::size_t size() const noexcept { return n_zenith * n_azimuth; }
    double zenith_step() const noexcept { return 90.0 / static_cast<double>(n_zenith); }
    double azimuth_step() const noexcept { return 360.0 / static_cast<double>(n_azimuth); }

    SectorBounds bounds(std::size_t zi, std::size_t ai) const noexcept {
        return {zi * zenith_step(), (zi + 1) * zenith_step(), ai * azimuth_step(), (ai + 1) * azimuth_step()};
    }
    std::size_t zenith_index(double zenith_deg) const noexcept {
        return std::min(static_cast<std::size_t>(std::max(zenith_deg, 0.0) / zenith_step()), n_zenith - 1);
    }
    std::size_t azimuth_index(double azimuth_deg) const noexcept {
        return static_cast<std::size_t>(azimuth_deg / azimuth_step()) % n_azimuth;
    }

    friend bool operator==(const Partition&, const Partition&) = default;
};

struct SunSector {
    std::size_t zenith_index = 0;
    std::size_t azimuth_index = 0;
    SectorBounds bounds;
    double zenith_deg = 0.0;   ///< duration-weighted mean sun zenith within the sector
    double azimuth_deg = 0.0;  ///< duration-weighted mean sun azimuth within the sector
    double duration_h = 0.0;
    std::size_t sample_count = 0;
};

/// Sectors the sun visits, ordered by (zenith_index, azimuth_index).
struct SunMap {
    Partition partition;
    std::vector<SunSector> sectors;

    double total_hours() const {
        double t = 0.0;
        for (const auto& s : sectors) t += s.duration_h;
        return t;
    }
};

namespace detail {
inline void check_sun_map_args(double latitude_deg, std::size_t n_zenith, std::size_t n_azimuth) {
    if (n_zenith < 1) throw InvalidArgument("sun map needs at least one zenith band");
    if (n_azimuth < 4) throw InvalidArgument("sun map needs at least four azimuth bins");
    if (!(std::abs(latitude_deg) <= kMaxLatitude)) {
        throw InvalidArgument("latitude outside +/-66 degrees (polar day/night unsupported)");
    }
}
} // namespace detail

/// Sun map accumulated over the given days. Samples are taken at the middle
/// of each hour interval; samples below the horizon are dropped.
inline SunMap build_sun_map_for_days(double latitude_deg, const std::vector<int>& days_of_year, double hour_interval_h,
                                     std::size_t n_zenith, std::size_t n_azimuth,
                                     const std::optional<ClockCorrection>& clock = std::nullopt) {
    detail::check_sun_map_args(latitude_deg, n_zenith, n_azimuth);
    if (!(hour_interval_h > 0.0) || hour_interval_h > 2.0) throw InvalidArgument("hour interval must be in (0, 2]");
    SunMap map;
    map.partition = {n_zenith, n_azimuth};
    struct Acc {
        double zenith_sum = 0, azimuth_sum = 0;
        std::size_t n = 0;
    };
    std::map<std::pair<std::size_t, std::size_t>, Acc> acc;
    const auto steps = static_cast<std::size_t>(std::llround(std::floor(24.0 / hour_interval_h + 1e-9)));
    for (int doy : days_of_year) {
        for (std::size_t i = 0; i < steps; ++i) {
            const double clock_h = (static_cast<double>(i) + 0.5) * hour_interval_h;
            const double t = clock ? clock->solar_time(doy, clock_h) : clock_h;
            const SolarPosition p = solar_position(latitude_deg, doy, t);
            if (!(p.zenith_deg < 90.0)) continue;
            auto& a = acc[{map.partition.zenith_index(p.zenith_deg), map.partition.azimuth_index(p.azimuth_deg)}];
            a.zenith_sum += p.zenith_deg;
            a.azimuth_sum += p.azimuth_deg;
            ++a.n;
        }
    }
    if (acc.empty()) throw InvalidArgument("no daylight samples for the configured period");
    for (const auto& [key, a] : acc) {
        SunSector s;
        s.zenith_index = key.first;
        s.azimuth_index = key.second;
        s.bounds = map.partition.bounds(key.first, key.second);
        s.sample_count = a.n;
        s.duration_h = static_cast<double>(a.n) * hour_interval_h;
        s.zenith_deg = a.zenith_sum / static_cast<double>(a.n);
        s.azimuth_deg = a.azimuth_sum / static_cast<double>(a.n);
        map.sectors.push_back(s);
    }
    return map;
}

/// Sun map over every sampled day of `config` (each day counted once).
inline SunMap build_sun_map(double latitude_deg, const TimeConfig& config, std::size_t n_zenith = 8,
                            std::size_t n_azimuth = 16) {
    std::vector<int> doys;
    for (const auto& d : sampled_days(config)) doys.push_back(d.day_of_year);
    return build_sun_map_for_days(latitude_deg, doys, config.hour_interval_h, n_zenith, n_azimuth, config.clock);
}

/// One simulated day of a period: its sun map and the calendar days it represents.
struct PeriodComponent {
    int month = 1;
    int day_of_year = 1;
    double weight_days = 1.0;
    SunMap sun_map;
};

inline std::vector<PeriodComponent> build_period(double latitude_deg, const TimeConfig& config,
                                                 std::size_t n_zenith = 8, std::size_t n_azimuth = 16) {
    std::vector<PeriodComponent> out;
    for (const auto& d : sampled_days(config)) {
        out.push_back({d.month, d.day_of_year, d.weight_days,
                       build_sun_map_for_days(latitude_deg, {d.day_of_year}, config.hour_interval_h, n_zenith,
                                              n_azimuth, config.clock)});
    }
    return out;
}

struct SkySector {
    std::size_t zenith_index = 0;
    std::size_t azimuth_index = 0;
    SectorBounds bounds;
    double centroid_zenith_deg = 0.0;
    double centroid_azimuth_deg = 0.0;
    double weight = 0.0;  ///< fraction of the hemisphere's solid angle
};

/// Sky sectors in zenith-major order: index = zenith_index * n_azimuth + azimuth_index.
struct SkyMap {
    Partition partition;
    std::vector<SkySector> sectors;
};

inline SkyMap build_sky_map(std::size_t n_zenith = 8, std::size_t n_azimuth = 16) {
    if (n_zenith < 1 || n_azimuth < 1) throw InvalidArgument("sky map needs at least one sector per axis");
    SkyMap map;
    map.partition = {n_zenith, n_azimuth};
    map.sectors.reserve(map.partition.size());
    for (std::size_t zi = 0; zi < n_zenith; ++zi) {
        for (std::size_t ai = 0; ai < n_azimuth; ++ai) {
            SkySector s;
            s.zenith_index = zi;
            s.azimuth_index = ai;
            s.bounds = map.partition.bounds(zi, ai);
            s.centroid_zenith_deg = 0.5 * (s.bounds.zenith_lo + s.bounds.zenith_hi);
            s.centroid_azimuth_deg = 0.5 * (s.bounds.azimuth_lo + s.bounds.azimuth_hi);
            s.weight = (std::cos(s.bounds.zenith_lo * kDeg) - std::cos(s.bounds.zenith_hi * kDeg)) /
                       static_cast<double>(n_azimuth);
            map.sectors.push_back(s);
        }
    }
    return map;
}

/// Diagnostic dump: sector, zenith, azimuth, duration.
inline void write_sun_map_csv(std::ostream& out, const SunMap& map) {
    out << "sector,zenith_deg,azimuth_deg,duration_h\n";
    for (const auto& s : map.sectors) {
        out << s.zenith_index * map.partition.n_azimuth + s.azimuth_index << ',' << s.zenith_deg << ',' << s.azimuth_deg
            << ',' << s.duration_h << '\n';
    }
}

inline void write_sky_map_csv(std::ostream& out, const SkyMap& map) {
    out << "sector,zenith_deg,azimuth_deg,weight\n";
    for (std::size_t i = 0; i < map.sectors.size(); ++i) {
        const auto& s = map.sectors[i];
        out << i << ',' << s.centroid_zenith_deg << ',' << s.centroid_azimuth_deg << ',' << s.weight << '\n';
    }
}

} // namespace roofsolar::sunsky
