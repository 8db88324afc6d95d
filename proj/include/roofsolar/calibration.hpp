// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monthly atmosphere parameters from ground-station radiation records.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "roofsolar/grid.hpp"
#include "roofsolar/radiation.hpp"

namespace roofsolar::calibration {

inline constexpr double kMaxDiffuseProportion = 0.99;
/// Slope of the linear transmissivity relation; tau(0.3) = 0.5.
inline constexpr double kTransmissivityScale = 5.0 / 7.0;

struct StationRecord {
    int month = 1;
    int year = 0;
    std::string station_id;
    double mean_global = 0.0;
    double mean_diffuse = 0.0;
};

struct DiffuseProportion {
    double value = 0.0;
    bool clamped = false;
};

/// d = diffuse / global, clamped to [0, 0.99].
inline DiffuseProportion diffuse_proportion(double mean_diffuse, double mean_global) {
    if (!(mean_global > 0.0)) throw InvalidArgument("global radiation must be positive");
    const double raw = mean_diffuse / mean_global;
    DiffuseProportion d{std::clamp(raw, 0.0, kMaxDiffuseProportion), false};
    d.clamped = d.value != raw;
    return d;
}

/// tau = (5/7) (1 - d).
inline double transmissivity_from_diffuse(double d) {
    if (!(d >= 0.0 && d < 1.0)) throw InvalidArgument("diffuse proportion must be in [0, 1)");
    return kTransmissivityScale * (1.0 - d);
}

struct CalibrationRow {
    std::string station_id;
    int year = 0;
    int month = 1;
    std::size_t records = 0;
    double diffuse_proportion = 0.0;
    double transmissivity = 0.0;
    bool clamped = false;
    bool diffuse_exceeds_global = false;

    radiation::AtmosphereParams params() const { return {diffuse_proportion, transmissivity}; }
};

struct CalibrationResult {
    /// One row per (station, month) in first-appearance order.
    std::vector<CalibrationRow> rows;
    std::vector<std::string> diagnostics;

    std::map<int, radiation::AtmosphereParams> for_station(const std::string& station_id) const {
        std::map<int, radiation::AtmosphereParams> out;
        for (const auto& r : rows)
            if (r.station_id == station_id) out[r.month] = r.params();
        if (out.empty()) throw InvalidArgument("no calibration rows for station '" + station_id + "'");
        return out;
    }
};

/// Groups records by (station, month); several records for a group are
/// combined as the ratio of their summed diffuse and global means.
inline CalibrationResult calibrate(const std::vector<StationRecord>& records) {
    if (records.empty()) throw InvalidArgument("no station records to calibrate from");
    struct Group {
        std::string station;
        int year = 0, month = 0;
        double global = 0, diffuse = 0;
        std::size_t n = 0;
    };
    std::vector<Group> groups;
    std::map<std::pair<std::string, int>, std::size_t> index;
    for (const auto& r : records) {
        auto [it, inserted] = index.try_emplace({r.station_id, r.month}, groups.size());
        if (inserted) groups.push_back({r.station_id, r.year, r.month});
        Group& g = groups[it->second];
        g.global += r.mean_global;
        g.diffuse += r.mean_diffuse;
        ++g.n;
    }
    CalibrationResult out;
    for (const auto& g : groups) {
        const auto d = diffuse_proportion(g.diffuse, g.global);
        CalibrationRow row;
        row.station_id = g.station;
        row.year = g.year;
        row.month = g.month;
        row.records = g.n;
        row.diffuse_proportion = d.value;
        row.clamped = d.clamped;
        row.diffuse_exceeds_global = g.diffuse > g.global;
        row.transmissivity = transmissivity_from_diffuse(d.value);
        out.rows.push_back(row);
    }
    return out;
}

namespace detail {

inline std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c); };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        else if (ch == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else cur += ch;
    }
    out.push_back(trim(cur));
    return out;
}

} // namespace detail

/// Reads the station CSV (columns month, year, station_id, mean_global,
/// mean_diffuse in any order). Bad rows are reported in `diagnostics` and
/// skipped; at least one valid row is required.
inline CalibrationResult calibrate_from_station_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty station file");
    const auto header = detail::split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* name : {"month", "year", "station_id", "mean_global", "mean_diffuse"}) {
        if (!col.count(name)) throw FormatError(path.string() + ": missing column '" + name + "'");
    }
    std::vector<StationRecord> records;
    std::vector<std::string> diagnostics;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_csv(line);
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
        try {
            if (f.size() < header.size()) throw InvalidArgument("expected " + std::to_string(header.size()) + " fields");
            std::size_t used = 0;
            StationRecord r;
            r.month = std::stoi(f[col["month"]], &used);
            if (used != f[col["month"]].size()) throw InvalidArgument("month is not an integer");
            r.year = std::stoi(f[col["year"]]);
            r.station_id = f[col["station_id"]];
            r.mean_global = std::stod(f[col["mean_global"]]);
            r.mean_diffuse = std::stod(f[col["mean_diffuse"]]);
            if (r.month < 1 || r.month > 12) throw InvalidArgument("month outside 1..12");
            if (!(r.mean_global > 0.0)) throw InvalidArgument("mean_global must be positive");
            if (!(r.mean_diffuse >= 0.0)) throw InvalidArgument("mean_diffuse must be non-negative");
            if (r.mean_diffuse > r.mean_global) diagnostics.push_back(where + "mean_diffuse exceeds mean_global");
            records.push_back(std::move(r));
        } catch (const std::exception& e) {
            diagnostics.push_back(where + "skipped (" + e.what() + ")");
        }
    }
    if (records.empty()) throw FormatError(path.string() + ": no valid station rows");
    CalibrationResult result = calibrate(records);
    result.diagnostics = std::move(diagnostics);
    return result;
}

inline const char* month_abbrev(int month) {
    static const char* names[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    return names[(month - 1) % 12];
}

/// location, month, d, tau report.
inline void write_calibration_report(std::ostream& out, const CalibrationResult& result) {
    out << "location,month,year,diffuse_proportion,transmissivity,records,clamped\n";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    for (const auto& r : result.rows) {
        os << r.station_id << ',' << r.month << ',' << r.year << ',' << r.diffuse_proportion << ',' << r.transmissivity
           << ',' << r.records << ',' << (r.clamped ? 1 : 0) << '\n';
    }
    out << os.str();
}

} // namespace roofsolar::calibration
