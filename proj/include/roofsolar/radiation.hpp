// SPDX-License-Identifier: Apache-2.0
#pragma once

// Direct, diffuse and global insolation from sun and sky maps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roofsolar/grid.hpp"
#include "roofsolar/horizon.hpp"
#include "roofsolar/parallel.hpp"
#include "roofsolar/sunsky.hpp"
#include "roofsolar/terrain.hpp"

namespace roofsolar::radiation {

/// Exo-atmospheric flux at mean Earth-Sun distance, W/m^2.
inline constexpr double kSolarConstant = 1367.0;
/// Zenith angles beyond this are clamped in the optical path.
inline constexpr double kMaxPathZenith = 80.0;

struct AtmosphereParams {
    double diffuse_proportion = 0.3;
    double transmissivity = 0.5;

    static AtmosphereParams ideal() { return {0.3, 0.5}; }

    void validate() const {
        if (!(diffuse_proportion >= 0.0 && diffuse_proportion < 1.0)) {
            throw InvalidArgument("diffuse proportion must be in [0, 1)");
        }
        if (!(transmissivity > 0.0 && transmissivity <= 1.0)) throw InvalidArgument("transmissivity must be in (0, 1]");
    }

    friend bool operator==(const AtmosphereParams&, const AtmosphereParams&) = default;
};

/// Atmosphere per month: a single value for every month, or a month table.
struct AtmosphereSchedule {
    std::optional<AtmosphereParams> uniform = AtmosphereParams::ideal();
    std::map<int, AtmosphereParams> monthly;

    static AtmosphereSchedule constant(AtmosphereParams p) { return {p, {}}; }
    static AtmosphereSchedule by_month(std::map<int, AtmosphereParams> table) { return {std::nullopt, std::move(table)}; }

    AtmosphereParams at(int month) const {
        if (auto it = monthly.find(month); it != monthly.end()) return it->second;
        if (uniform) return *uniform;
        throw InvalidArgument("no atmosphere parameters for month " + std::to_string(month));
    }
};

/// exp(-0.000118 h - 1.638e-9 h^2): thinning of the air column with elevation.
inline double elevation_factor(double elevation_m) {
    return std::exp(-0.000118 * elevation_m - 1.638e-9 * elevation_m * elevation_m);
}

/// Path length through the atmosphere relative to the zenith path.
inline double relative_optical_path(double zenith_deg, double elevation_m) {
    return elevation_factor(elevation_m) / std::cos(std::min(zenith_deg, kMaxPathZenith) * sunsky::kDeg);
}

/// Cosine of the angle between a ray from (zenith, azimuth) and the surface
/// normal, clamped at 0 for rays hitting the back of the surface. Flat cells
/// (aspect -1) are treated as horizontal.
inline double incidence_cosine(double zenith_deg, double azimuth_deg, double slope_deg, double aspect_deg) {
    if (aspect_deg == terrain::kFlatAspect) slope_deg = 0.0;
    const double z = zenith_deg * sunsky::kDeg, s = slope_deg * sunsky::kDeg;
    const double c = std::cos(z) * std::cos(s) + std::sin(z) * std::sin(s) * std::cos((azimuth_deg - aspect_deg) * sunsky::kDeg);
    return std::max(c, 0.0);
}

struct CellContext {
    double elevation_m = 0.0;
    double slope_deg = 0.0;
    double aspect_deg = terrain::kFlatAspect;
    horizon::HorizonProfile horizon;
    double latitude_deg = 0.0;
};

struct InsolationResult {
    double direct_wh_m2 = 0.0;
    double diffuse_wh_m2 = 0.0;
    double global_wh_m2 = 0.0;
};

inline constexpr std::size_t kDefaultGapSubsamples = 16;

/// Sum over sun sectors of SConst * beta^m * duration * gap * cos(incidence), Wh/m^2.
inline double direct_insolation(const CellContext& ctx, const sunsky::SunMap& sun_map, const AtmosphereParams& atm,
                                std::size_t gap_subsamples = kDefaultGapSubsamples) {
    atm.validate();
    double total = 0.0;
    for (const auto& s : sun_map.sectors) {
        const double gap = horizon::gap_fraction(ctx.horizon, s.bounds, gap_subsamples);
        if (gap == 0.0) continue;
        const double beam = std::pow(atm.transmissivity, relative_optical_path(s.zenith_deg, ctx.elevation_m));
        total += kSolarConstant * beam * s.duration_h * gap *
                 incidence_cosine(s.zenith_deg, s.azimuth_deg, ctx.slope_deg, ctx.aspect_deg);
    }
    return total;
}

/// Global normal radiation over the sun map, Wh/m^2: the duration-weighted
/// mean beam attenuation times the daylight hours, scaled up by 1 / (1 - d)
/// so that d of it is the diffuse share.
inline double global_normal_radiation(const sunsky::SunMap& sun_map, const AtmosphereParams& atm, double elevation_m) {
    atm.validate();
    double weighted = 0.0, hours = 0.0;
    for (const auto& s : sun_map.sectors) {
        weighted += std::pow(atm.transmissivity, relative_optical_path(s.zenith_deg, elevation_m)) * s.duration_h;
        hours += s.duration_h;
    }
    if (hours == 0.0) return 0.0;
    return kSolarConstant * (weighted / hours) * hours / (1.0 - atm.diffuse_proportion);
}

/// Uniform-sky diffuse: sum over sky sectors of Rglb * d * weight * gap * cos(incidence at the centroid).
inline double diffuse_insolation(const CellContext& ctx, const sunsky::SkyMap& sky_map, const AtmosphereParams& atm,
                                 double global_normal_wh_m2, std::size_t gap_subsamples = kDefaultGapSubsamples) {
    atm.validate();
    if (global_normal_wh_m2 < 0.0) throw InvalidArgument("global normal radiation must be non-negative");
    double total = 0.0;
    for (const auto& s : sky_map.sectors) {
        const double gap = horizon::gap_fraction(ctx.horizon, s.bounds, gap_subsamples);
        if (gap == 0.0) continue;
        total += s.weight * gap * incidence_cosine(s.centroid_zenith_deg, s.centroid_azimuth_deg, ctx.slope_deg, ctx.aspect_deg);
    }
    return global_normal_wh_m2 * atm.diffuse_proportion * total;
}

/// Insolation over a whole period (one or more simulated days, each standing
/// for weight_days calendar days) with per-month atmosphere. Sector constants
/// are prepared once so that per-cell work is a handful of multiply-adds per
/// sector; the sums are the same as calling direct_insolation and
/// diffuse_insolation per day and weighting.
class InsolationModel {
public:
    InsolationModel(const std::vector<sunsky::PeriodComponent>& period, const sunsky::SkyMap& sky,
                    const AtmosphereSchedule& atmosphere, std::size_t gap_subsamples, double reference_elevation_m)
        : sky_(sky), k_(gap_subsamples) {
        if (period.empty()) throw InvalidArgument("empty simulation period");
        sun_partition_ = period.front().sun_map.partition;
        for (const auto& c : period) {
            if (!(c.sun_map.partition == sun_partition_)) throw InvalidArgument("sun maps use different partitions");
            const AtmosphereParams atm = atmosphere.at(c.month);
            atm.validate();
            const double log_beta = std::log(atm.transmissivity);
            for (const auto& s : c.sun_map.sectors) {
                SunTerm t;
                t.log_beam_per_factor = log_beta / std::cos(std::min(s.zenith_deg, kMaxPathZenith) * sunsky::kDeg);
                t.energy = kSolarConstant * s.duration_h * c.weight_days;
                t.cos_zenith = std::cos(s.zenith_deg * sunsky::kDeg);
                t.sin_zenith = std::sin(s.zenith_deg * sunsky::kDeg);
                t.azimuth_deg = s.azimuth_deg;
                t.gap_index = s.zenith_index * sun_partition_.n_azimuth + s.azimuth_index;
                sun_terms_.push_back(t);
            }
            diffuse_scale_ += global_normal_radiation(c.sun_map, atm, reference_elevation_m) * atm.diffuse_proportion *
                              c.weight_days;
        }
        for (const auto& s : sky.sectors) {
            SkyTerm t;
            t.weight = s.weight;
            t.cos_zenith = std::cos(s.centroid_zenith_deg * sunsky::kDeg);
            t.sin_zenith = std::sin(s.centroid_zenith_deg * sunsky::kDeg);
            t.azimuth_deg = s.centroid_azimuth_deg;
            sky_terms_.push_back(t);
        }
        sun_eval_.emplace(sun_partition_, k_);
        shared_gaps_ = sun_partition_ == sky.partition && sky.sectors.size() == sky.partition.size();
        if (!shared_gaps_) sky_eval_.emplace(sky.partition, k_);
    }

    /// Scratch buffers for one worker thread.
    struct Workspace {
        std::vector<double> sun_gaps, sky_gaps;
        // Beam energy per sun term for the last elevation seen.
        std::vector<double> beam;
        double beam_elevation = std::numeric_limits<double>::quiet_NaN();
    };

    InsolationResult evaluate(const CellContext& ctx, Workspace& ws) const {
        sun_eval_->evaluate(ctx.horizon, ws.sun_gaps);
        const std::vector<double>* sky_gaps = &ws.sun_gaps;
        if (!shared_gaps_) {
            sky_eval_->evaluate(ctx.horizon, ws.sky_gaps);
            sky_gaps = &ws.sky_gaps;
        }
        const double slope = ctx.aspect_deg == terrain::kFlatAspect ? 0.0 : ctx.slope_deg;
        const double cs = std::cos(slope * sunsky::kDeg), ss = std::sin(slope * sunsky::kDeg);
        if (!(ws.beam_elevation == ctx.elevation_m)) {
            const double factor = elevation_factor(ctx.elevation_m);
            ws.beam.resize(sun_terms_.size());
            for (std::size_t i = 0; i < sun_terms_.size(); ++i)
                ws.beam[i] = sun_terms_[i].energy * std::exp(sun_terms_[i].log_beam_per_factor * factor);
            ws.beam_elevation = ctx.elevation_m;
        }

        auto incidence = [&](double cos_z, double sin_z, double azimuth_deg) {
            const double c = cos_z * cs + sin_z * ss * std::cos((azimuth_deg - ctx.aspect_deg) * sunsky::kDeg);
            return std::max(c, 0.0);
        };

        InsolationResult r;
        for (std::size_t i = 0; i < sun_terms_.size(); ++i) {
            const auto& t = sun_terms_[i];
            const double gap = ws.sun_gaps[t.gap_index];
            if (gap == 0.0) continue;
            const double cosi = slope == 0.0 ? std::max(t.cos_zenith, 0.0) : incidence(t.cos_zenith, t.sin_zenith, t.azimuth_deg);
            if (cosi == 0.0) continue;
            r.direct_wh_m2 += ws.beam[i] * gap * cosi;
        }
        double sky_sum = 0.0;
        for (std::size_t i = 0; i < sky_terms_.size(); ++i) {
            const double gap = (*sky_gaps)[i];
            if (gap == 0.0) continue;
            const auto& t = sky_terms_[i];
            const double cosi = slope == 0.0 ? std::max(t.cos_zenith, 0.0) : incidence(t.cos_zenith, t.sin_zenith, t.azimuth_deg);
            sky_sum += t.weight * gap * cosi;
        }
        r.diffuse_wh_m2 = diffuse_scale_ * sky_sum;
        r.global_wh_m2 = r.direct_wh_m2 + r.diffuse_wh_m2;
        return r;
    }

    InsolationResult evaluate(const CellContext& ctx) const {
        Workspace ws;
        return evaluate(ctx, ws);
    }

    /// Sum over period components of Rglb * d * weight_days.
    double diffuse_scale() const noexcept { return diffuse_scale_; }

private:
    struct SunTerm {
        double log_beam_per_factor, energy, cos_zenith, sin_zenith, azimuth_deg;
        std::size_t gap_index;
    };
    struct SkyTerm {
        double weight, cos_zenith, sin_zenith, azimuth_deg;
    };

    sunsky::SkyMap sky_;
    std::size_t k_;
    sunsky::Partition sun_partition_;
    std::vector<SunTerm> sun_terms_;
    std::vector<SkyTerm> sky_terms_;
    double diffuse_scale_ = 0.0;
    std::optional<horizon::PartitionGapEvaluator> sun_eval_, sky_eval_;
    bool shared_gaps_ = false;
};

struct RadiationGrids {
    Grid direct;
    Grid diffuse;
    Grid global;
};

struct RadiationSettings {
    horizon::HorizonConfig horizon;
    unsigned workers = 1;
    /// Elevation used for the run-wide global normal radiation; defaults to
    /// the mean of the valid DEM cells.
    std::optional<double> reference_elevation_m;
};

inline double mean_elevation(const Grid& dem) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : dem.values()) {
        if (dem.is_nodata(v)) continue;
        sum += v;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

/// Per-cell insolation rasters in Wh/m^2 for the period. Cells outside the
/// mask (label 0) or with nodata in any input are nodata.
inline RadiationGrids global_insolation_grid(const Grid& dem, const Grid& slope, const Grid& aspect, const ZoneGrid* mask,
                                             const std::vector<sunsky::PeriodComponent>& period, const sunsky::SkyMap& sky,
                                             const AtmosphereSchedule& atmosphere, const RadiationSettings& settings) {
    require_same_geometry(dem.geometry(), slope.geometry(), "radiation: slope");
    require_same_geometry(dem.geometry(), aspect.geometry(), "radiation: aspect");
    if (mask) require_same_geometry(dem.geometry(), mask->geometry, "radiation: mask");
    settings.horizon.validate(dem.cell_size());

    const double ref = settings.reference_elevation_m.value_or(mean_elevation(dem));
    const InsolationModel model(period, sky, atmosphere, settings.horizon.gap_subsamples, ref);
    const horizon::HorizonSampler sampler(dem, settings.horizon.directions, settings.horizon.max_radius_m);

    const double nd = dem.nodata();
    RadiationGrids out{Grid::like(dem, nd), Grid::like(dem, nd), Grid::like(dem, nd)};
    parallel_rows(dem.rows(), settings.workers, [&](std::size_t rb, std::size_t re) {
        InsolationModel::Workspace ws;
        CellContext ctx;
        for (std::size_t r = rb; r < re; ++r) {
            for (std::size_t c = 0; c < dem.cols(); ++c) {
                if (mask && mask->at(r, c) == 0) continue;
                if (!dem.valid(r, c) || !slope.valid(r, c) || !aspect.valid(r, c)) continue;
                ctx.elevation_m = dem.at(r, c);
                ctx.slope_deg = slope.at(r, c);
                ctx.aspect_deg = aspect.at(r, c);
                sampler.profile_into(r, c, ctx.horizon);
                const InsolationResult res = model.evaluate(ctx, ws);
                out.direct.at(r, c) = res.direct_wh_m2;
                out.diffuse.at(r, c) = res.diffuse_wh_m2;
                out.global.at(r, c) = res.global_wh_m2;
            }
        }
    });
    return out;
}

} // namespace roofsolar::radiation
