// SPDX-License-Identifier: Apache-2.0
// Writes the 64x64 synthetic-city fixture: a 1 m DSM with seven buildings,
// their footprints as GeoJSON, and a run configuration.
//
// usage: make_synthetic_city <output-dir>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "roofsolar/raster_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kOriginX = 714000.0;
constexpr double kOriginY = 3166064.0;
constexpr double kGround = 200.0;
constexpr std::size_t kSize = 64;

enum class Roof { Flat, GableEW, MonoSouth };

struct Building {
    std::string id;
    std::size_t row0, col0, rows, cols;
    double eave_m;
    double ridge_m;
    Roof roof;
};

// Rows grow southwards. Two buildings fall below the 1500 ft^2 area filter.
const std::vector<Building> kBuildings = {
    {"B01", 4, 4, 14, 16, 12.0, 12.0, Roof::Flat},       // 224 m^2
    {"B02", 4, 30, 20, 14, 9.0, 13.0, Roof::GableEW},    // 280 m^2, faces N and S
    {"B03", 30, 6, 12, 20, 30.0, 30.0, Roof::Flat},      // 240 m^2 tower
    {"B04", 4, 52, 8, 8, 4.0, 4.0, Roof::Flat},          // 64 m^2, filtered
    {"B05", 46, 6, 12, 12, 6.0, 6.0, Roof::Flat},        // 144 m^2, shaded by B03
    {"B06", 30, 34, 12, 11, 5.0, 5.0, Roof::Flat},       // 132 m^2, filtered
    {"B07", 46, 34, 15, 15, 10.0, 14.0, Roof::MonoSouth} // 225 m^2, south pitch
};

double roof_height(const Building& b, std::size_t r, std::size_t c) {
    (void)c;
    const double t = (static_cast<double>(r - b.row0) + 0.5) / static_cast<double>(b.rows);
    switch (b.roof) {
    case Roof::Flat: return b.eave_m;
    case Roof::GableEW: return b.eave_m + (b.ridge_m - b.eave_m) * (1.0 - std::abs(2.0 * t - 1.0));
    case Roof::MonoSouth: return b.ridge_m - (b.ridge_m - b.eave_m) * t;
    }
    return b.eave_m;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_synthetic_city <output-dir>\n";
        return 2;
    }
    const fs::path dir = argv[1];
    fs::create_directories(dir);

    roofsolar::GridGeometry g{kSize, kSize, kOriginX, kOriginY, 1.0, "EPSG:32643"};
    roofsolar::Grid dem(g, roofsolar::kDefaultNodata, kGround);
    json features = json::array();
    for (const auto& b : kBuildings) {
        for (std::size_t r = b.row0; r < b.row0 + b.rows; ++r)
            for (std::size_t c = b.col0; c < b.col0 + b.cols; ++c) dem.at(r, c) = kGround + roof_height(b, r, c);
        const double x0 = kOriginX + static_cast<double>(b.col0), x1 = x0 + static_cast<double>(b.cols);
        const double y0 = kOriginY - static_cast<double>(b.row0), y1 = y0 - static_cast<double>(b.rows);
        features.push_back({{"type", "Feature"},
                            {"properties", {{"osm_id", b.id}, {"height_m", b.ridge_m}}},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", {{{x0, y0}, {x0, y1}, {x1, y1}, {x1, y0}, {x0, y0}}}}}}});
    }
    roofsolar::io::write_raster(dem, dir / "dem.tif");

    const json fc = {{"type", "FeatureCollection"},
                     {"crs", {{"type", "name"}, {"properties", {{"name", "urn:ogc:def:crs:EPSG::32643"}}}}},
                     {"features", features}};
    std::ofstream(dir / "footprints.geojson") << fc.dump(1) << '\n';

    const json config = {
        {"paths", {{"dem", "dem.tif"}, {"footprints", "footprints.geojson"}, {"output_dir", "output"}}},
        {"time", {{"mode", "month"}, {"month", 1}, {"hour_interval_h", 0.5}}},
        {"atmosphere", {{"mode", "ideal"}}},
        {"horizon", {{"directions", 32}, {"max_radius_m", 100.0}}},
        {"workers", 1},
    };
    std::ofstream(dir / "config.json") << config.dump(2) << '\n';
    std::cout << "wrote " << (dir / "dem.tif").string() << ", footprints.geojson, config.json\n";
    return 0;
}
