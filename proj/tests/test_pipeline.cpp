// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "roofsolar/pipeline.hpp"
#include "test_support.hpp"

using namespace roofsolar;
using namespace roofsolar::pipeline;
using testsupport::data_dir;
using testsupport::scratch_dir;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunConfig fixture_config(const fs::path& out) {
    RunConfig c = load_config(data_dir() / "synthetic_city" / "config.json");
    c.output_dir = out;
    return c;
}

std::size_t csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n - 1;
}

} // namespace

TEST(Config, DefaultsAndStrictKeys) {
    const RunConfig d = config_from_json(nlohmann::json::object());
    EXPECT_EQ(d.time.hour_interval_h, 0.5);
    EXPECT_EQ(d.atmosphere.mode, AtmosphereMode::Ideal);
    EXPECT_EQ(d.horizon.directions, 32u);
    EXPECT_EQ(d.horizon.max_radius_m, 500.0);
    EXPECT_EQ(d.suitability.min_radiation, 50.0);
    EXPECT_THROW(config_from_json({{"colour", 1}}), InvalidArgument);
    EXPECT_THROW(config_from_json({{"horizon", {{"dirs", 8}}}}), InvalidArgument);
    EXPECT_THROW(config_from_json({{"time", {{"mode", "weekly"}}}}), InvalidArgument);
    const RunConfig annual = config_from_json({{"time", {{"mode", "annual"}}}});
    EXPECT_EQ(annual.suitability.min_radiation, 800.0);
    const RunConfig custom = config_from_json({{"time", {{"mode", "annual"}}}, {"suitability", {{"min_radiation_kwh_m2", 900}}}});
    EXPECT_EQ(custom.suitability.min_radiation, 900.0);
    RunConfig bad;
    bad.terrain_window = 4;
    EXPECT_THROW(bad.validate(), InvalidArgument);
    bad = RunConfig{};
    bad.slope_method = "geodesic";
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Config, AtmosphereFlag) {
    AtmosphereConfig a;
    apply_atmosphere_flag(a, "d=0.785,tau=0.155");
    EXPECT_EQ(a.mode, AtmosphereMode::Explicit);
    EXPECT_DOUBLE_EQ(a.explicit_params.diffuse_proportion, 0.785);
    EXPECT_DOUBLE_EQ(a.explicit_params.transmissivity, 0.155);
    apply_atmosphere_flag(a, "calibrated");
    EXPECT_EQ(a.mode, AtmosphereMode::Calibrated);
    EXPECT_THROW(apply_atmosphere_flag(a, "d=0.3"), InvalidArgument);
    EXPECT_THROW(apply_atmosphere_flag(a, "d=1.2,tau=0.5"), InvalidArgument);
    EXPECT_THROW(apply_atmosphere_flag(a, "sunny"), InvalidArgument);
}

TEST(Pipeline, SyntheticCityArtifactSet) {
    const auto out = scratch_dir();
    const auto result = run_pipeline(fixture_config(out));
    for (const char* f : {"slope.tif", "aspect.tif", "direct.tif", "diffuse.tif", "global.tif", "suitability.tif",
                          "buildings.csv", "top_n.geojson", "manifest.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    EXPECT_FALSE(fs::exists(out / "calibration.csv"));

    // Seven footprints, two of them under 1500 ft^2 (64 and 132 m^2).
    const auto fps = read_footprints(data_dir() / "synthetic_city" / "footprints.geojson");
    std::size_t passing = 0;
    for (const auto& f : fps.footprints) passing += geom::polygon_area(f.polygon) >= power::kMinBuildingAreaM2;
    EXPECT_EQ(fps.footprints.size(), 7u);
    EXPECT_EQ(passing, 5u);
    EXPECT_EQ(csv_rows(out / "buildings.csv"), passing);
    EXPECT_EQ(result.buildings.size(), passing);

    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["inputs"]["dem"]["sha256"], sha256_file(data_dir() / "synthetic_city" / "dem.tif"));
    EXPECT_EQ(manifest["parameters"]["time"]["hour_interval_h"], 0.5);
    EXPECT_NEAR(manifest["resolved"]["latitude_deg"].get<double>(), 28.6, 0.01);
    EXPECT_EQ(manifest["outputs"].size(), 8u);

    const Grid global = io::read_raster(out / "global.tif");
    const Grid dem = io::read_raster(data_dir() / "synthetic_city" / "dem.tif");
    const auto zones = rasterize_zones(fps, dem.geometry());
    for (std::size_t r = 0; r < dem.rows(); ++r)
        for (std::size_t c = 0; c < dem.cols(); ++c) EXPECT_EQ(global.valid(r, c), zones.at(r, c) != 0);
}

TEST(Pipeline, WorkerCountAndRerunAreByteIdentical) {
    const auto base = scratch_dir();
    RunConfig one = fixture_config(base / "w1"), eight = fixture_config(base / "w8"), again = fixture_config(base / "again");
    eight.workers = 8;
    run_pipeline(one);
    run_pipeline(eight);
    run_pipeline(again);
    for (const char* f : {"slope.tif", "aspect.tif", "direct.tif", "diffuse.tif", "global.tif", "suitability.tif",
                          "buildings.csv", "top_n.geojson"}) {
        EXPECT_EQ(slurp(base / "w1" / f), slurp(base / "w8" / f)) << f;
        EXPECT_EQ(slurp(base / "w1" / f), slurp(base / "again" / f)) << f;
    }
    EXPECT_EQ(slurp(base / "w1" / "manifest.json"), slurp(base / "again" / "manifest.json"));
}

TEST(Pipeline, CalibratedDelhiJanuary) {
    const auto out = scratch_dir();
    RunConfig c = fixture_config(out);
    c.atmosphere.mode = AtmosphereMode::Calibrated;
    c.atmosphere.station = "Delhi";
    c.station_csv = data_dir() / "station_means.csv";
    run_pipeline(c);
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_NEAR(m["resolved"]["atmosphere_by_month"]["1"]["d"].get<double>(), 0.785, 0.001);
    EXPECT_NEAR(m["resolved"]["atmosphere_by_month"]["1"]["tau"].get<double>(), 0.154, 0.002);
    EXPECT_TRUE(fs::exists(out / "calibration.csv"));
    EXPECT_TRUE(m["inputs"].contains("station_csv"));

    c.atmosphere.station.clear();
    EXPECT_THROW(run_pipeline(c), StageError);
}

TEST(Pipeline, FailureNamesStageAndRemovesPartialOutputs) {
    const auto out = scratch_dir();
    RunConfig c = fixture_config(out);
    c.latitude.reset();
    // A local CRS prevents the sun stage from deriving the latitude.
    const auto dir = scratch_dir() / "in";
    fs::create_directories(dir);
    Grid dem = io::read_raster(c.dem);
    dem.set_crs("");
    io::write_raster(dem, dir / "dem.tif");
    auto fps = nlohmann::json::parse(slurp(c.footprints));
    fps.erase("crs");
    std::ofstream(dir / "fp.geojson") << fps.dump();
    c.dem = dir / "dem.tif";
    c.footprints = dir / "fp.geojson";
    c.output_dir = dir / "out";
    try {
        run_pipeline(c);
        FAIL() << "expected a stage error";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "sunsky");
    }
    EXPECT_TRUE(fs::is_empty(dir / "out"));

    RunConfig missing = fixture_config(out);
    missing.dem = out / "nope.tif";
    try {
        run_pipeline(missing);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "config");
    }
}

TEST(Stages, RerunIndependently) {
    const auto out = scratch_dir();
    RunConfig c = fixture_config(out / "full");
    run_pipeline(c);
    const fs::path dem = c.dem, fp = c.footprints;
    run_terrain_stage(dem, out / "t", c);
    EXPECT_EQ(slurp(out / "t" / "slope.tif"), slurp(out / "full" / "slope.tif"));
    run_radiation_stage(dem, out / "t" / "slope.tif", out / "t" / "aspect.tif", fp, out / "r", c);
    EXPECT_EQ(slurp(out / "r" / "global.tif"), slurp(out / "full" / "global.tif"));
    run_suitability_stage(out / "r" / "global.tif", true, out / "t" / "slope.tif", out / "t" / "aspect.tif",
                          out / "s" / "suitability.tif", c);
    EXPECT_EQ(slurp(out / "s" / "suitability.tif"), slurp(out / "full" / "suitability.tif"));
    run_power_stage(out / "r" / "global.tif", true, out / "s" / "suitability.tif", fp, out / "p", c);
    EXPECT_EQ(slurp(out / "p" / "buildings.csv"), slurp(out / "full" / "buildings.csv"));
    run_calibrate_stage(data_dir() / "station_means.csv", out / "cal.csv");
    EXPECT_EQ(csv_rows(out / "cal.csv"), 12u);
    run_downsample_stage(out / "r" / "global.tif", 4, Aggregate::Max, out / "d.tif");
    EXPECT_EQ(io::read_raster(out / "d.tif").rows(), 16u);
}

TEST(Checksum, KnownDigest) {
    const auto dir = scratch_dir();
    std::ofstream(dir / "abc.txt") << "abc";
    EXPECT_EQ(sha256_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
