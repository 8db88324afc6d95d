// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "roofsolar/radiation.hpp"
#include "roofsolar/terrain.hpp"
#include "test_support.hpp"

using namespace roofsolar;
using namespace roofsolar::radiation;
using testsupport::rel_diff;

namespace {

sunsky::SunMap single_sector_map(double zenith, double azimuth, double hours) {
    sunsky::SunMap m;
    m.partition = {8, 16};
    sunsky::SunSector s;
    s.zenith_index = m.partition.zenith_index(zenith);
    s.azimuth_index = m.partition.azimuth_index(azimuth);
    s.bounds = m.partition.bounds(s.zenith_index, s.azimuth_index);
    s.zenith_deg = zenith;
    s.azimuth_deg = azimuth;
    s.duration_h = hours;
    s.sample_count = 1;
    m.sectors.push_back(s);
    return m;
}

std::vector<sunsky::PeriodComponent> month_period(double lat, int month) {
    sunsky::TimeConfig c;
    c.month = month;
    return sunsky::build_period(lat, c);
}

double flat_open_global(double lat, int month, AtmosphereParams atm) {
    const InsolationModel model(month_period(lat, month), sunsky::build_sky_map(), AtmosphereSchedule::constant(atm), 16, 0.0);
    return model.evaluate(CellContext{}).global_wh_m2;
}

} // namespace

TEST(OpticalPath, HandValues) {
    EXPECT_DOUBLE_EQ(relative_optical_path(0, 0), 1.0);
    EXPECT_NEAR(relative_optical_path(60, 0), 2.0, 1e-12);
    EXPECT_NEAR(relative_optical_path(0, 1000), 0.8873, 1e-4);
    EXPECT_NEAR(relative_optical_path(0, 1000), std::exp(-0.119638), 1e-12);
    EXPECT_DOUBLE_EQ(relative_optical_path(85, 0), relative_optical_path(80, 0));
}

TEST(Incidence, HandValues) {
    for (double z : {0.0, 25.0, 60.0, 89.0}) EXPECT_NEAR(incidence_cosine(z, 123.0, 0.0, 200.0), std::cos(z * oracle::kRad), 1e-12);
    EXPECT_NEAR(incidence_cosine(35.0, 200.0, 35.0, 200.0), 1.0, 1e-12);
    EXPECT_NEAR(incidence_cosine(30, 180, 20, 90), 0.8138, 1e-4);
    EXPECT_EQ(incidence_cosine(80, 0, 60, 180), 0.0);
    EXPECT_NEAR(incidence_cosine(40, 10, 30, terrain::kFlatAspect), std::cos(40 * oracle::kRad), 1e-12);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> z(0, 90), a(0, 360), s(0, 60);
    for (int t = 0; t < 200; ++t) {
        const double zz = z(rng), aa = a(rng), ss = s(rng), asp = a(rng);
        EXPECT_NEAR(incidence_cosine(zz, aa, ss, asp), oracle::cos_incidence(zz, aa, ss, asp), 1e-12);
    }
}

TEST(Direct, UnitFactors) {
    CellContext ctx;
    EXPECT_NEAR(direct_insolation(ctx, single_sector_map(0.0, 0.0, 1.0), {0.3, 1.0}), 1367.0, 1e-9);
}

TEST(Direct, HalfTransmissivityAtSixtyDegrees) {
    CellContext ctx;
    const double v = direct_insolation(ctx, single_sector_map(60.0, 180.0, 1.0), {0.3, 0.5});
    EXPECT_NEAR(v, 1367.0 * 0.25 * 0.5, 1e-9);
    EXPECT_NEAR(v, 170.9, 0.05);
}

TEST(Direct, FullShadingIsZero) {
    CellContext ctx;
    ctx.horizon.angles_deg.assign(32, 90.0);
    sunsky::TimeConfig c;
    const auto map = sunsky::build_sun_map(23.0, c);
    EXPECT_EQ(direct_insolation(ctx, map, AtmosphereParams::ideal()), 0.0);
    EXPECT_EQ(diffuse_insolation(ctx, sunsky::build_sky_map(), AtmosphereParams::ideal(), 5000.0), 0.0);
}

TEST(Diffuse, Cases) {
    CellContext ctx;
    const auto sky1 = sunsky::build_sky_map(1, 1);
    EXPECT_EQ(diffuse_insolation(ctx, sunsky::build_sky_map(), {0.0, 0.5}, 5000.0), 0.0);
    EXPECT_NEAR(diffuse_insolation(ctx, sky1, {0.3, 0.5}, 5000.0), 5000.0 * 0.3 * std::cos(45.0 * oracle::kRad), 1e-9);
    EXPECT_THROW(diffuse_insolation(ctx, sky1, {0.3, 0.5}, -1.0), InvalidArgument);
}

TEST(Atmosphere, Validation) {
    EXPECT_THROW((AtmosphereParams{1.0, 0.5}.validate()), InvalidArgument);
    EXPECT_THROW((AtmosphereParams{0.3, 0.0}.validate()), InvalidArgument);
    EXPECT_THROW((AtmosphereParams{-0.1, 0.5}.validate()), InvalidArgument);
    EXPECT_NO_THROW((AtmosphereParams{0.0, 1.0}.validate()));
    const auto sched = AtmosphereSchedule::by_month({{1, {0.785, 0.154}}});
    EXPECT_EQ(sched.at(1).diffuse_proportion, 0.785);
    EXPECT_THROW(sched.at(2), InvalidArgument);
}

TEST(Model, MatchesSingleCellFunctions) {
    const auto period = month_period(28.6, 1);
    const auto sky = sunsky::build_sky_map();
    const AtmosphereParams atm{0.4, 0.6};
    const InsolationModel model(period, sky, AtmosphereSchedule::constant(atm), 16, 150.0);
    CellContext ctx;
    ctx.elevation_m = 220.0;
    ctx.slope_deg = 25.0;
    ctx.aspect_deg = 160.0;
    for (int i = 0; i < 32; ++i) ctx.horizon.angles_deg.push_back(5.0 + 20.0 * std::abs(std::sin(i * 0.4)));
    const auto r = model.evaluate(ctx);
    const double w = period[0].weight_days;
    EXPECT_LT(rel_diff(r.direct_wh_m2, w * direct_insolation(ctx, period[0].sun_map, atm)), 1e-12);
    const double rglb = global_normal_radiation(period[0].sun_map, atm, 150.0);
    EXPECT_LT(rel_diff(r.diffuse_wh_m2, w * diffuse_insolation(ctx, sky, atm, rglb)), 1e-12);
    EXPECT_EQ(r.global_wh_m2, r.direct_wh_m2 + r.diffuse_wh_m2);
}

TEST(Model, OracleEquivalenceOnRandomCells) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ang(0, 60), az(0, 360), slope(0, 50);
    sunsky::TimeConfig annual;
    annual.mode = sunsky::TimeMode::Annual;
    const auto period = sunsky::build_period(23.0, annual);
    const auto sky = sunsky::build_sky_map(6, 12);
    const InsolationModel model(period, sky, AtmosphereSchedule::constant({0.35, 0.55}), 8, 300.0);
    for (int t = 0; t < 20; ++t) {
        CellContext ctx;
        ctx.elevation_m = 250.0;
        ctx.slope_deg = slope(rng);
        ctx.aspect_deg = t % 4 == 0 ? terrain::kFlatAspect : az(rng);
        for (int i = 0; i < 32; ++i) ctx.horizon.angles_deg.push_back(ang(rng));
        const auto r = model.evaluate(ctx);
        const auto o = oracle::insolation(period, sky, 0.35, 0.55, 250.0, 300.0, ctx.slope_deg, ctx.aspect_deg,
                                          ctx.horizon.angles_deg, 8);
        EXPECT_LT(rel_diff(r.direct_wh_m2, o.direct), 1e-9);
        EXPECT_LT(rel_diff(r.diffuse_wh_m2, o.diffuse), 1e-9);
    }
}

TEST(RadiationProperty, MonotoneInTransmissivity) {
    const auto period = month_period(23.0, 4);
    const auto sky = sunsky::build_sky_map();
    CellContext ctx;
    ctx.slope_deg = 20;
    ctx.aspect_deg = 135;
    for (int i = 0; i < 32; ++i) ctx.horizon.angles_deg.push_back(i % 3 * 10.0);
    double prev = -1;
    for (double beta = 0.05; beta <= 1.0; beta += 0.05) {
        const double v = InsolationModel(period, sky, AtmosphereSchedule::constant({0.3, beta}), 16, 0).evaluate(ctx).direct_wh_m2;
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(RadiationProperty, MonotoneInShading) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0, 50);
    std::uniform_int_distribution<int> idx(0, 31);
    const InsolationModel model(month_period(23.0, 1), sunsky::build_sky_map(), AtmosphereSchedule::constant(AtmosphereParams::ideal()), 16, 0);
    for (int t = 0; t < 50; ++t) {
        CellContext a;
        for (int i = 0; i < 32; ++i) a.horizon.angles_deg.push_back(u(rng));
        CellContext b = a;
        b.horizon.angles_deg[idx(rng)] += 15.0;
        const auto ra = model.evaluate(a), rb = model.evaluate(b);
        EXPECT_LE(rb.direct_wh_m2, ra.direct_wh_m2);
        EXPECT_LE(rb.diffuse_wh_m2, ra.diffuse_wh_m2);
        EXPECT_LE(rb.global_wh_m2, ra.global_wh_m2);
    }
}

TEST(RadiationProperty, JanuaryBelowMayAt23North) {
    EXPECT_LT(flat_open_global(23.0, 1, AtmosphereParams::ideal()), flat_open_global(23.0, 5, AtmosphereParams::ideal()));
}

TEST(RadiationGrid, ConstantDemUniformAndMasking) {
    const Grid dem(testsupport::geometry(12, 12), kDefaultNodata, 210.0);
    const auto d = terrain::derivatives(dem);
    RadiationSettings settings;
    settings.horizon.max_radius_m = 20;
    const auto period = month_period(23.0, 1);
    const auto sky = sunsky::build_sky_map();
    const auto atm = AtmosphereSchedule::constant(AtmosphereParams::ideal());
    const auto out = global_insolation_grid(dem, d.slope_deg, d.aspect_deg, nullptr, period, sky, atm, settings);
    const double ref = out.global.at(6, 6);
    for (std::size_t r = 0; r < 12; ++r)
        for (std::size_t c = 0; c < 12; ++c) {
            EXPECT_LT(rel_diff(out.global.at(r, c), ref), 1e-9);
            EXPECT_EQ(out.global.at(r, c), out.direct.at(r, c) + out.diffuse.at(r, c));
        }

    ZoneGrid mask{dem.geometry(), std::vector<std::int32_t>(144, 0), {"a"}, 0};
    mask.labels[13] = 1;
    Grid dem2 = dem;
    dem2.at(0, 0) = dem2.nodata();
    const auto d2 = terrain::derivatives(dem2);
    const auto m = global_insolation_grid(dem2, d2.slope_deg, d2.aspect_deg, &mask, period, sky, atm, settings);
    EXPECT_TRUE(m.global.valid(1, 1));
    EXPECT_FALSE(m.global.valid(0, 0));
    EXPECT_FALSE(m.global.valid(5, 5));

    const Grid other(testsupport::geometry(12, 13));
    EXPECT_THROW(global_insolation_grid(dem, other, d.aspect_deg, nullptr, period, sky, atm, settings), GeometryMismatch);
}

TEST(RadiationGrid, OracleEquivalenceOnFiveByFiveScene) {
    Grid dem(testsupport::geometry(5, 5), kDefaultNodata, 100.0);
    const double heights[5][5] = {{100, 101, 103, 101, 100}, {102, 108, 108, 104, 100}, {100, 108, 110, 106, 100},
                                  {100, 103, 104, 103, 101}, {100, 100, 101, 100, 100}};
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c) dem.at(r, c) = heights[r][c];
    const auto d = terrain::derivatives(dem);
    RadiationSettings settings;
    settings.horizon.max_radius_m = 10;
    const auto period = month_period(23.0, 1);
    const auto sky = sunsky::build_sky_map();
    const auto out = global_insolation_grid(dem, d.slope_deg, d.aspect_deg, nullptr, period, sky,
                                            AtmosphereSchedule::constant(AtmosphereParams::ideal()), settings);
    const double ref = mean_elevation(dem);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c) {
            const auto h = oracle::horizon(dem, r, c, 32, 10);
            const auto o = oracle::insolation(period, sky, 0.3, 0.5, dem.at(r, c), ref, d.slope_deg.at(r, c),
                                              d.aspect_deg.at(r, c), h, 16);
            EXPECT_LT(rel_diff(out.direct.at(r, c), o.direct), 1e-6);
            EXPECT_LT(rel_diff(out.diffuse.at(r, c), o.diffuse), 1e-6);
        }
}

TEST(RadiationGrid, WorkerCountIsBitIdentical) {
    const Grid dem = testsupport::random_grid(24, 24, 5, 200, 215);
    const auto d = terrain::derivatives(dem);
    const auto period = month_period(28.6, 3);
    const auto sky = sunsky::build_sky_map();
    const auto atm = AtmosphereSchedule::constant(AtmosphereParams::ideal());
    RadiationSettings one, eight;
    one.horizon.max_radius_m = eight.horizon.max_radius_m = 30;
    eight.workers = 8;
    const auto a = global_insolation_grid(dem, d.slope_deg, d.aspect_deg, nullptr, period, sky, atm, one);
    const auto b = global_insolation_grid(dem, d.slope_deg, d.aspect_deg, nullptr, period, sky, atm, eight);
    EXPECT_EQ(a.global, b.global);
    EXPECT_EQ(a.direct, b.direct);
}
