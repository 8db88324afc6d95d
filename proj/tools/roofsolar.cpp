// SPDX-License-Identifier: Apache-2.0
// roofsolar: command-line entry point for the rooftop solar pipeline.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "roofsolar/pipeline.hpp"

namespace rp = roofsolar::pipeline;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<unsigned> workers;
    std::optional<int> month;
    bool annual = false;
    std::string atmosphere;
    std::string output;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON configuration file");
    cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    cmd->add_option("--month", f.month, "Simulate a single month (1-12)")->check(CLI::Range(1, 12));
    cmd->add_flag("--annual", f.annual, "Simulate the full year");
    cmd->add_option("--atmosphere", f.atmosphere, "ideal | calibrated | d=X,tau=Y");
    cmd->add_option("--output", f.output, "Output directory");
}

rp::RunConfig resolve(const CommonFlags& f) {
    rp::RunConfig c = rp::stage("config", [&] { return f.config.empty() ? rp::RunConfig{} : rp::load_config(f.config); });
    rp::stage("config", [&] {
        if (f.workers) c.workers = *f.workers;
        if (f.annual && f.month) throw roofsolar::InvalidArgument("--annual and --month are exclusive");
        if (f.annual) c.time.mode = roofsolar::sunsky::TimeMode::Annual;
        if (f.month) {
            c.time.mode = roofsolar::sunsky::TimeMode::Month;
            c.time.month = *f.month;
        }
        if (!f.atmosphere.empty()) rp::apply_atmosphere_flag(c.atmosphere, f.atmosphere);
        if (!f.output.empty()) c.output_dir = f.output;
        c.sync_suitability_period();
        c.validate();
    });
    return c;
}

void print_paths(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) std::cout << p.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rooftop solar potential from elevation rasters and building footprints"};
    app.require_subcommand(1);

    CommonFlags run_f;
    auto* run = app.add_subcommand("run", "Full pipeline");
    add_common(run, run_f);
    std::string run_dem, run_fp, run_station;
    run->add_option("--dem", run_dem, "DEM raster (overrides config)");
    run->add_option("--footprints", run_fp, "Footprint GeoJSON (overrides config)");
    run->add_option("--station-csv", run_station, "Station records for calibrated mode");

    CommonFlags ter_f;
    auto* ter = app.add_subcommand("terrain", "Slope and aspect rasters");
    add_common(ter, ter_f);
    std::string ter_dem;
    std::optional<int> ter_window;
    ter->add_option("--dem", ter_dem, "DEM raster")->required();
    ter->add_option("--window", ter_window, "Odd kernel size 3..15");

    CommonFlags rad_f;
    auto* rad = app.add_subcommand("radiation", "Direct, diffuse and global insolation rasters");
    add_common(rad, rad_f);
    std::string rad_dem, rad_slope, rad_aspect, rad_fp, rad_station;
    std::optional<double> rad_lat;
    rad->add_option("--dem", rad_dem, "DEM raster")->required();
    rad->add_option("--slope", rad_slope, "Precomputed slope raster");
    rad->add_option("--aspect", rad_aspect, "Precomputed aspect raster");
    rad->add_option("--footprints", rad_fp, "Restrict to footprint cells");
    rad->add_option("--station-csv", rad_station, "Station records for calibrated mode");
    rad->add_option("--latitude", rad_lat, "Latitude override, degrees");

    std::string cal_in, cal_out = "calibration.csv";
    auto* cal = app.add_subcommand("calibrate", "Monthly d and tau from station records");
    cal->add_option("--station-csv", cal_in, "Station CSV")->required();
    cal->add_option("--output", cal_out, "Report CSV path");

    CommonFlags suit_f;
    auto* suit = app.add_subcommand("suitability", "Suitable-cell mask");
    add_common(suit, suit_f);
    std::string suit_rad, suit_slope, suit_aspect, suit_preset, suit_out;
    std::optional<double> suit_min;
    bool suit_wh = false;
    suit->add_option("--radiation", suit_rad, "Global insolation raster")->required();
    suit->add_flag("--wh", suit_wh, "Radiation raster is in Wh/m^2 (default kWh/m^2)");
    suit->add_option("--slope", suit_slope, "Slope raster")->required();
    suit->add_option("--aspect", suit_aspect, "Aspect raster")->required();
    suit->add_option("--preset", suit_preset, "2D | 3D");
    suit->add_option("--min-radiation", suit_min, "Threshold, kWh/m^2");
    suit->add_option("--mask", suit_out, "Output mask path (default <output>/suitability.tif)");

    CommonFlags pow_f;
    auto* pow = app.add_subcommand("power", "Per-building electricity and ranking");
    add_common(pow, pow_f);
    std::string pow_rad, pow_mask, pow_fp, pow_basis;
    bool pow_wh = false;
    std::optional<std::size_t> pow_top;
    pow->add_option("--radiation", pow_rad, "Global insolation raster")->required();
    pow->add_flag("--wh", pow_wh, "Radiation raster is in Wh/m^2 (default kWh/m^2)");
    pow->add_option("--suitability", pow_mask, "Suitable-cell mask");
    pow->add_option("--footprints", pow_fp, "Footprint GeoJSON")->required();
    pow->add_option("--area-basis", pow_basis, "suitable | footprint");
    pow->add_option("--top-n", pow_top, "Number of ranked buildings")->check(CLI::PositiveNumber);

    std::string ds_in, ds_out, ds_method = "mean";
    std::size_t ds_factor = 2;
    auto* ds = app.add_subcommand("downsample", "Block-aggregate a raster to a coarser grid");
    ds->add_option("--input", ds_in, "Input raster")->required();
    ds->add_option("--output", ds_out, "Output raster")->required();
    ds->add_option("--factor", ds_factor, "Block size in cells")->required();
    ds->add_option("--method", ds_method, "mean | min | max");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            rp::RunConfig c = resolve(run_f);
            if (!run_dem.empty()) c.dem = run_dem;
            if (!run_fp.empty()) c.footprints = run_fp;
            if (!run_station.empty()) c.station_csv = run_station;
            const auto result = rp::run_pipeline(c);
            print_paths(result.outputs);
        } else if (*ter) {
            rp::RunConfig c = resolve(ter_f);
            if (ter_window) c.terrain_window = *ter_window;
            print_paths(rp::run_terrain_stage(ter_dem, c.output_dir, c));
        } else if (*rad) {
            rp::RunConfig c = resolve(rad_f);
            if (rad_lat) c.latitude = *rad_lat;
            if (!rad_station.empty()) c.station_csv = rad_station;
            print_paths(rp::run_radiation_stage(rad_dem, rad_slope, rad_aspect, rad_fp, c.output_dir, c));
        } else if (*cal) {
            const auto result = rp::run_calibrate_stage(cal_in, cal_out);
            for (const auto& d : result.diagnostics) std::cerr << "[calibration] " << d << '\n';
            std::cout << cal_out << '\n';
        } else if (*suit) {
            rp::RunConfig c = resolve(suit_f);
            rp::stage("config", [&] {
                if (!suit_preset.empty()) c.suitability.preset = roofsolar::suitability::parse_preset(suit_preset);
                if (suit_min) {
                    c.suitability.min_radiation = *suit_min;
                    c.min_radiation_explicit = true;
                }
                c.sync_suitability_period();
                c.suitability.validate();
            });
            const fs::path out = suit_out.empty() ? c.output_dir / ("suitability" + c.raster_extension) : fs::path(suit_out);
            const auto s = rp::run_suitability_stage(suit_rad, suit_wh, suit_slope, suit_aspect, out, c);
            if (s.unit_suspect_cells > 0) {
                std::cerr << "[suitability] " << s.unit_suspect_cells
                          << " annual cells exceed 3000 kWh/m^2; input is probably Wh/m^2 (use --wh)\n";
            }
            std::cout << out.string() << '\n';
        } else if (*pow) {
            rp::RunConfig c = resolve(pow_f);
            rp::stage("config", [&] {
                if (!pow_basis.empty()) c.power.area_basis = roofsolar::power::parse_area_basis(pow_basis);
                if (pow_top) c.top_n = *pow_top;
            });
            rp::run_power_stage(pow_rad, pow_wh, pow_mask, pow_fp, c.output_dir, c);
            std::cout << (c.output_dir / "buildings.csv").string() << '\n' << (c.output_dir / "top_n.geojson").string() << '\n';
        } else if (*ds) {
            const auto method = rp::stage("config", [&] { return roofsolar::parse_aggregate(ds_method); });
            std::cout << rp::run_downsample_stage(ds_in, ds_factor, method, ds_out).string() << '\n';
        }
    } catch (const rp::StageError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "[roofsolar] " << e.what() << '\n';
        return 1;
    }
    return 0;
}
