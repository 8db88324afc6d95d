// SPDX-License-Identifier: Apache-2.0
// Monthly insolation on an open flat roof in Delhi, clear-sky defaults versus
// the station-calibrated atmosphere.
//
// usage: flat_roof_demo <station.csv> [station-id]

#include <cstdio>
#include <iostream>
#include <string>

#include "roofsolar/calibration.hpp"
#include "roofsolar/radiation.hpp"
#include "roofsolar/sunsky.hpp"

using namespace roofsolar;

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: flat_roof_demo <station.csv> [station-id]\n";
        return 2;
    }
    const std::string station = argc > 2 ? argv[2] : "Delhi";
    const double latitude = 28.6;
    try {
        const auto cal = calibration::calibrate_from_station_csv(argv[1]);
        const auto table = cal.for_station(station);
        const auto sky = sunsky::build_sky_map();
        radiation::CellContext flat;
        flat.elevation_m = 216.0;

        std::printf("month   d      tau    ideal_kWh  calibrated_kWh  reduction\n");
        for (const auto& [month, params] : table) {
            sunsky::TimeConfig tc;
            tc.month = month;
            const auto period = sunsky::build_period(latitude, tc);
            auto run = [&](const radiation::AtmosphereSchedule& s) {
                radiation::InsolationModel model(period, sky, s, radiation::kDefaultGapSubsamples, flat.elevation_m);
                radiation::InsolationModel::Workspace ws;
                return model.evaluate(flat, ws).global_wh_m2 / 1000.0;
            };
            const double ideal = run(radiation::AtmosphereSchedule::constant(radiation::AtmosphereParams::ideal()));
            const double calibrated = run(radiation::AtmosphereSchedule::constant(params));
            std::printf("%-7s %.3f  %.3f  %9.2f  %14.2f  %8.1f%%\n", calibration::month_abbrev(month), params.diffuse_proportion,
                        params.transmissivity, ideal, calibrated, 100.0 * (1.0 - calibrated / ideal));
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
