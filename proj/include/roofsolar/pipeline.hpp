// SPDX-License-Identifier: Apache-2.0
#pragma once

// End-to-end orchestration: configuration, stage runners and the run manifest.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "roofsolar/calibration.hpp"
#include "roofsolar/crs.hpp"
#include "roofsolar/footprints.hpp"
#include "roofsolar/grid.hpp"
#include "roofsolar/horizon.hpp"
#include "roofsolar/power.hpp"
#include "roofsolar/radiation.hpp"
#include "roofsolar/raster_io.hpp"
#include "roofsolar/resample.hpp"
#include "roofsolar/sunsky.hpp"
#include "roofsolar/suitability.hpp"
#include "roofsolar/terrain.hpp"

namespace roofsolar::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

/// Failure inside a named pipeline stage.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause)
        : Error("[" + stage + "] " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

enum class AtmosphereMode { Ideal, Calibrated, Explicit };

struct AtmosphereConfig {
    AtmosphereMode mode = AtmosphereMode::Ideal;
    radiation::AtmosphereParams explicit_params = radiation::AtmosphereParams::ideal();
    /// Station whose months are used in calibrated mode; may be empty when
    /// the station file holds a single station.
    std::string station;
};

struct RunConfig {
    fs::path dem;
    fs::path footprints;
    fs::path station_csv;
    fs::path output_dir = "output";
    std::optional<double> latitude;
    sunsky::TimeConfig time;
    AtmosphereConfig atmosphere;
    int terrain_window = 3;
    std::string slope_method = "planar";
    horizon::HorizonConfig horizon;
    std::size_t sun_zenith = 8, sun_azimuth = 16, sky_zenith = 8, sky_azimuth = 16;
    suitability::SuitabilityCriteria suitability = suitability::SuitabilityCriteria::for_period(suitability::Period::Monthly);
    bool min_radiation_explicit = false;
    power::PowerParams power;
    std::size_t top_n = 10;
    unsigned workers = 1;
    std::string raster_extension = ".tif";

    suitability::Period period() const {
        return time.mode == sunsky::TimeMode::Annual ? suitability::Period::Annual : suitability::Period::Monthly;
    }

    /// Keeps the default radiation threshold in step with the time mode.
    void sync_suitability_period() {
        suitability.period = period();
        if (!min_radiation_explicit) {
            suitability.min_radiation = suitability.period == suitability::Period::Annual ? suitability::kAnnualMinRadiation
                                                                                          : suitability::kMonthlyMinRadiation;
        }
    }

    void validate() const {
        time.validate();
        suitability.validate();
        if (terrain_window % 2 == 0 || terrain_window < 3 || terrain_window > 15) {
            throw InvalidArgument("terrain.window must be odd within 3..15");
        }
        if (slope_method != "planar") throw InvalidArgument("terrain.slope_method: only 'planar' is supported");
        if (horizon.directions < 8) throw InvalidArgument("horizon.directions must be >= 8");
        if (horizon.gap_subsamples < 1) throw InvalidArgument("horizon.gap_subsamples must be >= 1");
        if (!(horizon.max_radius_m > 0)) throw InvalidArgument("horizon.max_radius_m must be positive");
        if (sun_zenith < 1 || sun_azimuth < 4 || sky_zenith < 1 || sky_azimuth < 1) {
            throw InvalidArgument("sector counts out of range");
        }
        if (atmosphere.mode == AtmosphereMode::Explicit) atmosphere.explicit_params.validate();
        if (raster_extension != ".tif" && raster_extension != ".asc") {
            throw InvalidArgument("raster_format must be 'tif' or 'asc'");
        }
        if (workers < 1) throw InvalidArgument("workers must be >= 1");
        if (top_n < 1) throw InvalidArgument("power.top_n must be >= 1");
        if (latitude && !(std::abs(*latitude) <= sunsky::kMaxLatitude)) throw InvalidArgument("latitude outside +/-66");
        if (power.panel_yield < 0 || power.panel_yield > 1 || power.performance_ratio < 0 || power.performance_ratio > 1) {
            throw InvalidArgument("power.yield and power.performance_ratio must be within [0, 1]");
        }
    }
};

namespace detail {

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw InvalidArgument("config: unknown key '" + where + key + "'");
    }
}

inline const char* time_mode_name(sunsky::TimeMode m) {
    switch (m) {
    case sunsky::TimeMode::Annual: return "annual";
    case sunsky::TimeMode::Month: return "month";
    case sunsky::TimeMode::Day: return "day";
    }
    return "month";
}

inline const char* atmosphere_mode_name(AtmosphereMode m) {
    switch (m) {
    case AtmosphereMode::Ideal: return "ideal";
    case AtmosphereMode::Calibrated: return "calibrated";
    case AtmosphereMode::Explicit: return "explicit";
    }
    return "ideal";
}

} // namespace detail

/// Parses `--atmosphere` values: ideal | calibrated | d=X,tau=Y.
inline void apply_atmosphere_flag(AtmosphereConfig& atm, const std::string& value) {
    if (value == "ideal") {
        atm.mode = AtmosphereMode::Ideal;
        return;
    }
    if (value == "calibrated") {
        atm.mode = AtmosphereMode::Calibrated;
        return;
    }
    std::optional<double> d, tau;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw InvalidArgument("--atmosphere: expected ideal|calibrated|d=X,tau=Y");
        const std::string key = part.substr(0, eq);
        double v = 0;
        try {
            v = std::stod(part.substr(eq + 1));
        } catch (const std::exception&) {
            throw InvalidArgument("--atmosphere: invalid number in '" + part + "'");
        }
        if (key == "d") d = v;
        else if (key == "tau" || key == "beta") tau = v;
        else throw InvalidArgument("--atmosphere: unknown key '" + key + "'");
    }
    if (!d || !tau) throw InvalidArgument("--atmosphere: both d and tau are required");
    atm.mode = AtmosphereMode::Explicit;
    atm.explicit_params = {*d, *tau};
    atm.explicit_params.validate();
}

/// Reads a nested JSON configuration; every field is optional.
inline RunConfig config_from_json(const json& j, const fs::path& base_dir = {}) {
    RunConfig c;
    if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
    detail::reject_unknown(j, {"paths", "latitude", "time", "atmosphere", "terrain", "horizon", "sectors", "suitability",
                               "power", "workers", "raster_format"},
                           "");
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        detail::reject_unknown(p, {"dem", "footprints", "station_csv", "output_dir"}, "paths.");
        if (p.contains("dem")) c.dem = resolve(p["dem"].get<std::string>());
        if (p.contains("footprints")) c.footprints = resolve(p["footprints"].get<std::string>());
        if (p.contains("station_csv")) c.station_csv = resolve(p["station_csv"].get<std::string>());
        if (p.contains("output_dir")) c.output_dir = resolve(p["output_dir"].get<std::string>());
    }
    if (j.contains("latitude") && !j["latitude"].is_null()) c.latitude = j["latitude"].get<double>();
    if (j.contains("time")) {
        const auto& t = j["time"];
        detail::reject_unknown(t, {"mode", "month", "day", "hour_interval_h", "day_step", "clock_correction"}, "time.");
        const std::string mode = t.value("mode", "month");
        if (mode == "annual") c.time.mode = sunsky::TimeMode::Annual;
        else if (mode == "month") c.time.mode = sunsky::TimeMode::Month;
        else if (mode == "day") c.time.mode = sunsky::TimeMode::Day;
        else throw InvalidArgument("config: time.mode must be annual|month|day");
        c.time.month = t.value("month", c.time.month);
        c.time.day = t.value("day", c.time.day);
        c.time.hour_interval_h = t.value("hour_interval_h", c.time.hour_interval_h);
        c.time.day_step = t.value("day_step", c.time.day_step);
        if (t.contains("clock_correction") && !t["clock_correction"].is_null()) {
            const auto& cc = t["clock_correction"];
            c.time.clock = sunsky::ClockCorrection{cc.at("longitude_deg").get<double>(), cc.at("utc_offset_h").get<double>()};
        }
    }
    if (j.contains("atmosphere")) {
        const auto& a = j["atmosphere"];
        detail::reject_unknown(a, {"mode", "d", "tau", "station"}, "atmosphere.");
        const std::string mode = a.value("mode", "ideal");
        if (mode == "ideal") c.atmosphere.mode = AtmosphereMode::Ideal;
        else if (mode == "calibrated") c.atmosphere.mode = AtmosphereMode::Calibrated;
        else if (mode == "explicit") c.atmosphere.mode = AtmosphereMode::Explicit;
        else throw InvalidArgument("config: atmosphere.mode must be ideal|calibrated|explicit");
        c.atmosphere.explicit_params.diffuse_proportion = a.value("d", 0.3);
        c.atmosphere.explicit_params.transmissivity = a.value("tau", 0.5);
        c.atmosphere.station = a.value("station", "");
    }
    if (j.contains("terrain")) {
        const auto& t = j["terrain"];
        detail::reject_unknown(t, {"window", "slope_method"}, "terrain.");
        c.terrain_window = t.value("window", c.terrain_window);
        c.slope_method = t.value("slope_method", c.slope_method);
    }
    if (j.contains("horizon")) {
        const auto& h = j["horizon"];
        detail::reject_unknown(h, {"directions", "max_radius_m", "gap_subsamples"}, "horizon.");
        c.horizon.directions = h.value("directions", c.horizon.directions);
        c.horizon.max_radius_m = h.value("max_radius_m", c.horizon.max_radius_m);
        c.horizon.gap_subsamples = h.value("gap_subsamples", c.horizon.gap_subsamples);
    }
    if (j.contains("sectors")) {
        const auto& s = j["sectors"];
        detail::reject_unknown(s, {"sun_zenith", "sun_azimuth", "sky_zenith", "sky_azimuth"}, "sectors.");
        c.sun_zenith = s.value("sun_zenith", c.sun_zenith);
        c.sun_azimuth = s.value("sun_azimuth", c.sun_azimuth);
        c.sky_zenith = s.value("sky_zenith", c.sky_zenith);
        c.sky_azimuth = s.value("sky_azimuth", c.sky_azimuth);
    }
    if (j.contains("suitability")) {
        const auto& s = j["suitability"];
        detail::reject_unknown(s, {"preset", "max_slope_deg", "flat_slope_deg", "aspect_range_deg", "min_radiation_kwh_m2"},
                               "suitability.");
        if (s.contains("preset")) c.suitability.preset = suitability::parse_preset(s["preset"].get<std::string>());
        c.suitability.max_slope_deg = s.value("max_slope_deg", c.suitability.max_slope_deg);
        c.suitability.flat_slope_deg = s.value("flat_slope_deg", c.suitability.flat_slope_deg);
        if (s.contains("aspect_range_deg")) {
            const auto& r = s["aspect_range_deg"];
            if (!r.is_array() || r.size() != 2) throw InvalidArgument("config: suitability.aspect_range_deg needs two values");
            c.suitability.aspect_min_deg = r[0].get<double>();
            c.suitability.aspect_max_deg = r[1].get<double>();
        }
        if (s.contains("min_radiation_kwh_m2") && !s["min_radiation_kwh_m2"].is_null()) {
            c.suitability.min_radiation = s["min_radiation_kwh_m2"].get<double>();
            c.min_radiation_explicit = true;
        }
    }
    if (j.contains("power")) {
        const auto& p = j["power"];
        detail::reject_unknown(p, {"yield", "performance_ratio", "min_area_m2", "area_basis", "top_n"}, "power.");
        c.power.panel_yield = p.value("yield", c.power.panel_yield);
        c.power.performance_ratio = p.value("performance_ratio", c.power.performance_ratio);
        c.power.min_area_m2 = p.value("min_area_m2", c.power.min_area_m2);
        if (p.contains("area_basis")) c.power.area_basis = power::parse_area_basis(p["area_basis"].get<std::string>());
        c.top_n = p.value("top_n", c.top_n);
    }
    c.workers = j.value("workers", c.workers);
    if (j.contains("raster_format")) {
        const std::string f = j["raster_format"].get<std::string>();
        if (f != "tif" && f != "asc") throw InvalidArgument("config: raster_format must be tif|asc");
        c.raster_extension = "." + f;
    }
    c.sync_suitability_period();
    return c;
}

inline RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("config: " + path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

/// Every resolved parameter, as recorded in the manifest. Paths are omitted
/// here; the manifest lists inputs by name with their checksums.
inline json config_to_json(const RunConfig& c) {
    json time = {{"mode", detail::time_mode_name(c.time.mode)},
                 {"hour_interval_h", c.time.hour_interval_h},
                 {"day_step", c.time.day_step}};
    if (c.time.mode != sunsky::TimeMode::Annual) time["month"] = c.time.month;
    if (c.time.mode == sunsky::TimeMode::Day) time["day"] = c.time.day;
    if (c.time.clock) {
        time["clock_correction"] = {{"longitude_deg", c.time.clock->longitude_deg}, {"utc_offset_h", c.time.clock->utc_offset_h}};
    }
    json atm = {{"mode", detail::atmosphere_mode_name(c.atmosphere.mode)}};
    if (c.atmosphere.mode == AtmosphereMode::Explicit) {
        atm["d"] = c.atmosphere.explicit_params.diffuse_proportion;
        atm["tau"] = c.atmosphere.explicit_params.transmissivity;
    }
    if (c.atmosphere.mode == AtmosphereMode::Calibrated) atm["station"] = c.atmosphere.station;
    return {
        {"latitude", c.latitude ? json(*c.latitude) : json()},
        {"time", time},
        {"atmosphere", atm},
        {"terrain", {{"window", c.terrain_window}, {"slope_method", c.slope_method}}},
        {"horizon",
         {{"directions", c.horizon.directions}, {"max_radius_m", c.horizon.max_radius_m}, {"gap_subsamples", c.horizon.gap_subsamples}}},
        {"sectors",
         {{"sun_zenith", c.sun_zenith}, {"sun_azimuth", c.sun_azimuth}, {"sky_zenith", c.sky_zenith}, {"sky_azimuth", c.sky_azimuth}}},
        {"suitability",
         {{"preset", c.suitability.preset == suitability::Preset::Raster2D ? "2D" : "3D"},
          {"period", c.suitability.period == suitability::Period::Annual ? "annual" : "monthly"},
          {"max_slope_deg", c.suitability.max_slope_deg},
          {"flat_slope_deg", c.suitability.flat_slope_deg},
          {"aspect_range_deg", {c.suitability.aspect_min_deg, c.suitability.aspect_max_deg}},
          {"min_radiation_kwh_m2", c.suitability.min_radiation}}},
        {"power",
         {{"yield", c.power.panel_yield},
          {"performance_ratio", c.power.performance_ratio},
          {"min_area_m2", c.power.min_area_m2},
          {"area_basis", c.power.area_basis == power::AreaBasis::Suitable ? "suitable" : "footprint"},
          {"top_n", c.top_n}}},
        {"workers", c.workers},
        {"raster_format", c.raster_extension.substr(1)},
    };
}

/// Hex SHA-256 of a file's bytes.
inline std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path.string() + ": cannot open for checksum");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char b[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

/// Latitude of the raster centre, when the CRS allows it.
inline std::optional<double> raster_center_latitude(const GridGeometry& g) {
    const double x = g.origin_x + 0.5 * g.width();
    const double y = g.origin_y - 0.5 * g.height();
    if (auto ll = crs::to_lon_lat(g.crs_id, x, y)) return ll->lat;
    return std::nullopt;
}

inline double resolve_latitude(const RunConfig& c, const GridGeometry& g) {
    if (c.latitude) return *c.latitude;
    if (auto lat = raster_center_latitude(g)) return *lat;
    throw InvalidArgument("latitude cannot be derived from CRS '" + g.crs_id + "'; set 'latitude' in the config");
}

/// Runs `fn` and rethrows any failure tagged with the stage name.
template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

/// Tracks files written by a run so that a failed run leaves nothing behind.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) {
            fs::remove(f, ec);
            fs::path prj = f;
            prj.replace_extension(".prj");
            if (f.extension() == ".asc") fs::remove(prj, ec);
        }
    }

    fs::path add(const std::string& name) {
        fs::path p = dir_ / name;
        files_.push_back(p);
        return p;
    }
    const std::vector<fs::path>& files() const noexcept { return files_; }
    void commit() noexcept { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
    bool committed_ = false;
};

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw Error(path.string() + ": write failed");
}

/// Resolves the atmosphere schedule for a run; fills `calibration` when
/// calibrated mode was requested.
inline radiation::AtmosphereSchedule resolve_atmosphere(const RunConfig& c, std::optional<calibration::CalibrationResult>& cal) {
    switch (c.atmosphere.mode) {
    case AtmosphereMode::Ideal:
        return radiation::AtmosphereSchedule::constant(radiation::AtmosphereParams::ideal());
    case AtmosphereMode::Explicit:
        return radiation::AtmosphereSchedule::constant(c.atmosphere.explicit_params);
    case AtmosphereMode::Calibrated: {
        if (c.station_csv.empty()) throw InvalidArgument("calibrated atmosphere needs paths.station_csv");
        cal = calibration::calibrate_from_station_csv(c.station_csv);
        std::string station = c.atmosphere.station;
        if (station.empty()) {
            for (const auto& r : cal->rows) {
                if (!station.empty() && r.station_id != station) {
                    throw InvalidArgument("station file holds several stations; set atmosphere.station");
                }
                station = r.station_id;
            }
        }
        return radiation::AtmosphereSchedule::by_month(cal->for_station(station));
    }
    }
    return {};
}

struct RunResult {
    std::vector<fs::path> outputs;
    std::vector<power::BuildingSolarRecord> buildings;  ///< after the area filter
    json manifest;
};

inline std::string resolved_station(const RunConfig& c, const std::optional<calibration::CalibrationResult>& cal) {
    if (!c.atmosphere.station.empty() || !cal || cal->rows.empty()) return c.atmosphere.station;
    return cal->rows.front().station_id;
}

/// Full pipeline: geodata, terrain, sun/sky maps, radiation, suitability,
/// power, manifest. On failure every file written so far is removed and a
/// StageError names the failing stage.
inline RunResult run_pipeline(RunConfig config) {
    stage("config", [&] {
        config.sync_suitability_period();
        config.validate();
        if (config.dem.empty()) throw InvalidArgument("paths.dem is required");
        if (config.footprints.empty()) throw InvalidArgument("paths.footprints is required");
        for (const auto& p : {config.dem, config.footprints}) {
            if (!fs::exists(p)) throw InvalidArgument("input not found: " + p.string());
        }
        if (config.atmosphere.mode == AtmosphereMode::Calibrated && !fs::exists(config.station_csv)) {
            throw InvalidArgument("station file not found: " + config.station_csv.string());
        }
        fs::create_directories(config.output_dir);
    });
    OutputSet outputs(config.output_dir);
    const std::string ext = config.raster_extension;
    RunResult result;
    json inputs = json::object();

    const Grid dem = stage("geodata", [&] { return io::read_raster(config.dem); });
    const FootprintSet footprints = stage("geodata", [&] { return read_footprints(config.footprints); });
    const ZoneGrid zones = stage("geodata", [&] { return rasterize_zones(footprints, dem.geometry()); });
    inputs["dem"] = {{"file", config.dem.filename().string()}, {"sha256", sha256_file(config.dem)}};
    inputs["footprints"] = {{"file", config.footprints.filename().string()}, {"sha256", sha256_file(config.footprints)}};

    std::optional<calibration::CalibrationResult> cal;
    const radiation::AtmosphereSchedule schedule = stage("calibration", [&] { return resolve_atmosphere(config, cal); });
    if (cal) {
        inputs["station_csv"] = {{"file", config.station_csv.filename().string()}, {"sha256", sha256_file(config.station_csv)}};
        stage("calibration", [&] {
            std::ostringstream os;
            calibration::write_calibration_report(os, *cal);
            write_text(outputs.add("calibration.csv"), os.str());
        });
    }

    const auto derivs = stage("terrain", [&] {
        auto d = terrain::derivatives(dem, config.terrain_window, config.workers);
        io::write_raster(d.slope_deg, outputs.add("slope" + ext));
        io::write_raster(d.aspect_deg, outputs.add("aspect" + ext));
        return d;
    });

    const double latitude = stage("sunsky", [&] { return resolve_latitude(config, dem.geometry()); });
    const auto period = stage("sunsky", [&] { return sunsky::build_period(latitude, config.time, config.sun_zenith, config.sun_azimuth); });
    const auto sky = stage("sunsky", [&] { return sunsky::build_sky_map(config.sky_zenith, config.sky_azimuth); });

    json atmosphere_used = json::object();
    const auto rad = stage("radiation", [&] {
        std::map<int, bool> months;
        for (const auto& c : period) months[c.month] = true;
        for (const auto& [m, _] : months) {
            const auto p = schedule.at(m);
            atmosphere_used[std::to_string(m)] = {{"d", p.diffuse_proportion}, {"tau", p.transmissivity}};
        }
        radiation::RadiationSettings settings;
        settings.horizon = config.horizon;
        settings.workers = config.workers;
        auto r = radiation::global_insolation_grid(dem, derivs.slope_deg, derivs.aspect_deg, &zones, period, sky, schedule, settings);
        io::write_raster(r.direct, outputs.add("direct" + ext));
        io::write_raster(r.diffuse, outputs.add("diffuse" + ext));
        io::write_raster(r.global, outputs.add("global" + ext));
        return r;
    });

    Grid global_kwh = rad.global;
    for (double& v : global_kwh.values())
        if (!global_kwh.is_nodata(v)) v /= 1000.0;

    const auto suit = stage("suitability", [&] {
        auto s = suitability::suitable_cell_mask(global_kwh, derivs.slope_deg, derivs.aspect_deg, config.suitability);
        io::write_raster(s.mask, outputs.add("suitability" + ext));
        return s;
    });

    stage("power", [&] {
        const auto stats = power::zonal_stats(global_kwh, zones, &suit.mask);
        const auto all = power::building_records(footprints, zones, stats, config.power);
        result.buildings = power::building_filter(all, config.power.min_area_m2);
        std::ostringstream csv;
        power::write_records_csv(csv, result.buildings);
        write_text(outputs.add("buildings.csv"), csv.str());
        const auto top = power::rank_top_n(result.buildings, config.top_n);
        write_text(outputs.add("top_n.geojson"), power::records_geojson(top).dump(2) + "\n");
    });

    stage("manifest", [&] {
        json out_files = json::array();
        for (const auto& f : outputs.files()) out_files.push_back({{"file", f.filename().string()}, {"sha256", sha256_file(f)}});
        result.manifest = {
            {"parameters", config_to_json(config)},
            {"resolved",
             {{"latitude_deg", latitude},
              {"reference_elevation_m", radiation::mean_elevation(dem)},
              {"sampled_days", period.size()},
              {"atmosphere_by_month", atmosphere_used},
              {"station", cal ? json(resolved_station(config, cal)) : json()}}},
            {"inputs", inputs},
            {"outputs", out_files},
            {"summary",
             {{"footprints", footprints.footprints.size()},
              {"skipped_features", footprints.report.skipped_geometry},
              {"overlapping_cells", zones.overlapping_cells},
              {"suitable_cells", suit.suitable_cells},
              {"unit_suspect_cells", suit.unit_suspect_cells},
              {"buildings_after_filter", result.buildings.size()}}},
        };
        write_text(outputs.add("manifest.json"), result.manifest.dump(2) + "\n");
    });
    outputs.commit();
    result.outputs = outputs.files();
    return result;
}

// Single-stage runners used by the CLI subcommands.

inline std::vector<fs::path> run_terrain_stage(const fs::path& dem_path, const fs::path& out_dir, const RunConfig& c) {
    return stage("terrain", [&] {
        fs::create_directories(out_dir);
        const Grid dem = io::read_raster(dem_path);
        const auto d = terrain::derivatives(dem, c.terrain_window, c.workers);
        const fs::path s = out_dir / ("slope" + c.raster_extension), a = out_dir / ("aspect" + c.raster_extension);
        io::write_raster(d.slope_deg, s);
        io::write_raster(d.aspect_deg, a);
        return std::vector<fs::path>{s, a};
    });
}

inline std::vector<fs::path> run_radiation_stage(const fs::path& dem_path, const fs::path& slope_path, const fs::path& aspect_path,
                                                 const fs::path& footprints_path, const fs::path& out_dir, const RunConfig& c) {
    return stage("radiation", [&] {
        fs::create_directories(out_dir);
        const Grid dem = io::read_raster(dem_path);
        Grid slope, aspect;
        if (!slope_path.empty() && !aspect_path.empty()) {
            slope = io::read_raster(slope_path);
            aspect = io::read_raster(aspect_path);
        } else {
            auto d = terrain::derivatives(dem, c.terrain_window, c.workers);
            slope = std::move(d.slope_deg);
            aspect = std::move(d.aspect_deg);
        }
        std::optional<ZoneGrid> zones;
        if (!footprints_path.empty()) zones = rasterize_zones(read_footprints(footprints_path), dem.geometry());
        std::optional<calibration::CalibrationResult> cal;
        const auto schedule = resolve_atmosphere(c, cal);
        const double lat = resolve_latitude(c, dem.geometry());
        const auto period = sunsky::build_period(lat, c.time, c.sun_zenith, c.sun_azimuth);
        const auto sky = sunsky::build_sky_map(c.sky_zenith, c.sky_azimuth);
        radiation::RadiationSettings settings;
        settings.horizon = c.horizon;
        settings.workers = c.workers;
        const auto r = radiation::global_insolation_grid(dem, slope, aspect, zones ? &*zones : nullptr, period, sky, schedule, settings);
        std::vector<fs::path> out = {out_dir / ("direct" + c.raster_extension), out_dir / ("diffuse" + c.raster_extension),
                                     out_dir / ("global" + c.raster_extension)};
        io::write_raster(r.direct, out[0]);
        io::write_raster(r.diffuse, out[1]);
        io::write_raster(r.global, out[2]);
        return out;
    });
}

inline calibration::CalibrationResult run_calibrate_stage(const fs::path& station_csv, const fs::path& out_csv) {
    return stage("calibration", [&] {
        auto result = calibration::calibrate_from_station_csv(station_csv);
        std::ostringstream os;
        calibration::write_calibration_report(os, result);
        if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
        write_text(out_csv, os.str());
        return result;
    });
}

/// `radiation_in_wh` converts Wh/m^2 input to kWh/m^2 before filtering.
inline suitability::SuitabilityResult run_suitability_stage(const fs::path& radiation_path, bool radiation_in_wh,
                                                            const fs::path& slope_path, const fs::path& aspect_path,
                                                            const fs::path& out_path, const RunConfig& c) {
    return stage("suitability", [&] {
        Grid rad = io::read_raster(radiation_path);
        if (radiation_in_wh)
            for (double& v : rad.values())
                if (!rad.is_nodata(v)) v /= 1000.0;
        auto s = suitability::suitable_cell_mask(rad, io::read_raster(slope_path), io::read_raster(aspect_path), c.suitability);
        if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
        io::write_raster(s.mask, out_path);
        return s;
    });
}

inline std::vector<power::BuildingSolarRecord> run_power_stage(const fs::path& radiation_path, bool radiation_in_wh,
                                                               const fs::path& mask_path, const fs::path& footprints_path,
                                                               const fs::path& out_dir, const RunConfig& c) {
    return stage("power", [&] {
        fs::create_directories(out_dir);
        Grid rad = io::read_raster(radiation_path);
        if (radiation_in_wh)
            for (double& v : rad.values())
                if (!rad.is_nodata(v)) v /= 1000.0;
        std::optional<Grid> mask;
        if (!mask_path.empty()) mask = io::read_raster(mask_path);
        const auto fps = read_footprints(footprints_path);
        const auto zones = rasterize_zones(fps, rad.geometry());
        const auto stats = power::zonal_stats(rad, zones, mask ? &*mask : nullptr);
        auto records = power::building_filter(power::building_records(fps, zones, stats, c.power), c.power.min_area_m2);
        std::ostringstream csv;
        power::write_records_csv(csv, records);
        write_text(out_dir / "buildings.csv", csv.str());
        write_text(out_dir / "top_n.geojson", power::records_geojson(power::rank_top_n(records, c.top_n)).dump(2) + "\n");
        return records;
    });
}

inline fs::path run_downsample_stage(const fs::path& input, std::size_t factor, Aggregate method, const fs::path& output) {
    return stage("downsample", [&] {
        const Grid g = io::read_raster(input);
        if (output.has_parent_path()) fs::create_directories(output.parent_path());
        io::write_raster(downsample(g, factor, method), output);
        return output;
    });
}

} // namespace roofsolar::pipeline
