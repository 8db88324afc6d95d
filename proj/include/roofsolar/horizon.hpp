// SPDX-License-Identifier: Apache-2.0
#pragma once

// Horizon profiles by ray marching over the DEM, and sector gap fractions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "roofsolar/grid.hpp"
#include "roofsolar/sunsky.hpp"

namespace roofsolar::horizon {

struct HorizonConfig {
    std::size_t directions = 32;
    double max_radius_m = 500.0;
    std::size_t gap_subsamples = 16;

    void validate(double cell_size) const {
        if (directions < 8) throw InvalidArgument("horizon needs at least 8 directions");
        if (!(max_radius_m >= cell_size)) throw InvalidArgument("horizon radius must be at least one cell");
        if (gap_subsamples < 1) throw InvalidArgument("gap subsamples must be at least 1");
    }
};

/// Horizon elevation angles (degrees above the flat horizon) at azimuths
/// i * 360 / N, i = 0..N-1.
struct HorizonProfile {
    std::vector<double> angles_deg;

    std::size_t azimuth_count() const noexcept { return angles_deg.size(); }

    /// Linear interpolation between the two bracketing directions. An empty
    /// profile is an open horizon.
    double angle_at(double azimuth_deg) const noexcept {
        const std::size_t n = angles_deg.size();
        if (n == 0) return 0.0;
        const double pos = azimuth_deg / (360.0 / static_cast<double>(n));
        const double fl = std::floor(pos);
        const double frac = pos - fl;
        const auto i0 = static_cast<std::size_t>(static_cast<long long>(fl) % static_cast<long long>(n) + n) % n;
        const std::size_t i1 = (i0 + 1) % n;
        return angles_deg[i0] + frac * (angles_deg[i1] - angles_deg[i0]);
    }
};

/// Reusable ray marcher over one DEM. Holds per-direction step vectors and
/// the DEM maximum, which bounds how high any later sample can reach and
/// lets a ray stop once no farther sample can raise its horizon.
class HorizonSampler {
public:
    HorizonSampler(const Grid& dem, std::size_t directions, double max_radius_m) : dem_(dem) {
        HorizonConfig{directions, max_radius_m, 1}.validate(dem.cell_size());
        steps_ = static_cast<std::size_t>(std::floor(max_radius_m / dem.cell_size() + 1e-9));
        dir_col_.resize(directions);
        dir_row_.resize(directions);
        for (std::size_t i = 0; i < directions; ++i) {
            const double az = static_cast<double>(i) * 360.0 / static_cast<double>(directions) * sunsky::kDeg;
            dir_col_[i] = std::sin(az);
            dir_row_[i] = -std::cos(az);
        }
        zmax_ = -std::numeric_limits<double>::infinity();
        for (double v : dem.values())
            if (!dem.is_nodata(v)) zmax_ = std::max(zmax_, v);
        // Tile maxima include a one-cell halo so they bound every bilinear
        // sample whose base cell lies in the tile.
        tile_cols_ = (dem.cols() + kTile - 1) / kTile;
        tile_max_.assign((dem.rows() + kTile - 1) / kTile * tile_cols_, -std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < dem.rows(); ++r) {
            for (std::size_t c = 0; c < dem.cols(); ++c) {
                const double v = dem.at(r, c);
                if (dem.is_nodata(v)) {
                    has_nodata_ = true;
                    continue;
                }
                const std::size_t tr_lo = (r > 0 ? r - 1 : 0) / kTile, tc_lo = (c > 0 ? c - 1 : 0) / kTile;
                for (std::size_t tr = tr_lo; tr <= r / kTile; ++tr)
                    for (std::size_t tc = tc_lo; tc <= c / kTile; ++tc) {
                        double& m = tile_max_[tr * tile_cols_ + tc];
                        m = std::max(m, v);
                    }
            }
        }
    }

    std::size_t directions() const noexcept { return dir_col_.size(); }

    /// Bilinear elevation at fractional (row, col); false when outside the
    /// raster or when a contributing corner is nodata.
    bool sample(double row, double col, double& z) const noexcept {
        const double max_r = static_cast<double>(dem_.rows() - 1), max_c = static_cast<double>(dem_.cols() - 1);
        if (row < 0.0 || col < 0.0 || row > max_r || col > max_c) return false;
        const double fr0 = std::floor(row), fc0 = std::floor(col);
        const double fr = row - fr0, fc = col - fc0;
        const auto r0 = static_cast<std::size_t>(fr0), c0 = static_cast<std::size_t>(fc0);
        const std::size_t r1 = std::min(r0 + 1, dem_.rows() - 1), c1 = std::min(c0 + 1, dem_.cols() - 1);
        const double w00 = (1 - fr) * (1 - fc), w01 = (1 - fr) * fc, w10 = fr * (1 - fc), w11 = fr * fc;
        double acc = 0.0;
        auto add = [&](double w, std::size_t r, std::size_t c) {
            if (w == 0.0) return true;
            const double v = dem_.at(r, c);
            if (dem_.is_nodata(v)) return false;
            acc += w * v;
            return true;
        };
        if (!add(w00, r0, c0) || !add(w01, r0, c1) || !add(w10, r1, c0) || !add(w11, r1, c1)) return false;
        z = acc;
        return true;
    }

    /// Profile for a valid cell; throws for out-of-range or nodata cells.
    HorizonProfile profile(std::size_t row, std::size_t col) const {
        HorizonProfile p;
        profile_into(row, col, p);
        return p;
    }

    void profile_into(std::size_t row, std::size_t col, HorizonProfile& p) const {
        if (row >= dem_.rows() || col >= dem_.cols()) throw InvalidArgument("horizon cell outside the raster");
        const double z0 = dem_.at(row, col);
        if (dem_.is_nodata(z0)) throw InvalidArgument("horizon requested for a nodata cell");
        const std::size_t n = directions();
        p.angles_deg.assign(n, 0.0);
        const double rise = zmax_ - z0;
        if (!(rise > 0.0)) return;
        const double cs = dem_.cell_size();
        const double r0 = static_cast<double>(row), c0 = static_cast<double>(col);
        const double max_r = static_cast<double>(dem_.rows() - 1), max_c = static_cast<double>(dem_.cols() - 1);
        const std::size_t cols = dem_.cols(), r_last = dem_.rows() - 1, c_last = cols - 1;
        const double* zv = dem_.values().data();
        for (std::size_t d = 0; d < n; ++d) {
            const double dr = dir_row_[d], dc = dir_col_[d];
            double best = 0.0;  // tangent of the horizon angle
            for (std::size_t k = 1; k <= steps_; ++k) {
                const double dist = static_cast<double>(k) * cs;
                const double limit = best * dist;
                if (rise <= limit) break;
                const double kk = static_cast<double>(k);
                const double rr = r0 + kk * dr, cc = c0 + kk * dc;
                if (rr < 0.0 || cc < 0.0 || rr > max_r || cc > max_c) break;
                const auto ir = static_cast<std::size_t>(rr), ic = static_cast<std::size_t>(cc);
                const std::size_t tr = ir / kTile, tc = ic / kTile;
                if (tile_max_[tr * tile_cols_ + tc] - z0 <= limit) {
                    // Later samples in this tile are farther away, so they cannot raise best either.
                    k = std::max(k, last_step_in_tile(r0, c0, dr, dc, tr * kTile, tc * kTile, kTile));
                    continue;
                }
                double z;
                if (has_nodata_) {
                    if (!sample(rr, cc, z)) continue;
                } else {
                    const double fr = rr - static_cast<double>(ir), fc = cc - static_cast<double>(ic);
                    const std::size_t i00 = ir * cols + ic;
                    const std::size_t dc1 = ic < c_last ? 1 : 0, dr1 = ir < r_last ? cols : 0;
                    z = 0.0;
                    z += (1 - fr) * (1 - fc) * zv[i00];
                    z += (1 - fr) * fc * zv[i00 + dc1];
                    z += fr * (1 - fc) * zv[i00 + dr1];
                    z += fr * fc * zv[i00 + dr1 + dc1];
                }
                const double up = z - z0;
                if (up > limit) best = std::max(best, up / dist);
            }
            p.angles_deg[d] = std::atan(best) / sunsky::kDeg;
        }
    }

private:
    const Grid& dem_;
    std::size_t steps_ = 0;
    std::vector<double> dir_col_, dir_row_;
    double zmax_ = 0.0;
    static constexpr std::size_t kTile = 8;
    std::size_t tile_cols_ = 0;
    std::vector<double> tile_max_;
    bool has_nodata_ = false;

    // Largest step whose base cell surely stays inside the tile; errs low.
    static std::size_t last_step_in_tile(double r0, double c0, double dr, double dc, std::size_t tile_r, std::size_t tile_c,
                                         std::size_t size) noexcept {
        auto limit = [](double p0, double dp, double lo, double hi) {
            if (dp > 1e-12) return (hi - p0) / dp - 1e-6;
            if (dp < -1e-12) return (p0 - lo) / -dp - 1e-6;
            return std::numeric_limits<double>::infinity();
        };
        const double k = std::min(limit(r0, dr, static_cast<double>(tile_r), static_cast<double>(tile_r + size)),
                                  limit(c0, dc, static_cast<double>(tile_c), static_cast<double>(tile_c + size)));
        if (!(k >= 1.0)) return 0;
        return k > 1e15 ? std::numeric_limits<std::size_t>::max() / 2 : static_cast<std::size_t>(std::floor(k));
    }
};

inline HorizonProfile horizon_angles(const Grid& dem, std::size_t row, std::size_t col, std::size_t n_directions = 32,
                                     double max_radius_m = 500.0) {
    return HorizonSampler(dem, n_directions, max_radius_m).profile(row, col);
}

/// Centre of the j-th of k equal sub-intervals of [lo, hi].
inline double lattice_value(double lo, double hi, std::size_t j, std::size_t k) noexcept {
    return lo + (static_cast<double>(j) + 0.5) * (hi - lo) / static_cast<double>(k);
}

/// Open fraction of a sector on a k x k (zenith x azimuth) lattice. A sample
/// is open when its elevation exceeds the interpolated horizon.
inline double gap_fraction(const HorizonProfile& profile, const sunsky::SectorBounds& b, std::size_t k) {
    if (k < 1) throw InvalidArgument("gap fraction needs k >= 1");
    std::size_t open = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double h = profile.angle_at(lattice_value(b.azimuth_lo, b.azimuth_hi, i, k));
        for (std::size_t j = 0; j < k; ++j) {
            if (90.0 - lattice_value(b.zenith_lo, b.zenith_hi, j, k) > h) ++open;
        }
    }
    return static_cast<double>(open) / static_cast<double>(k * k);
}

/// Gap fractions for every sector of a regular partition at once. Lattice
/// elevations decrease monotonically down the zenith bands, so for each
/// azimuth sample the open samples form a prefix that a binary search finds;
/// results are identical to calling gap_fraction per sector.
class PartitionGapEvaluator {
public:
    PartitionGapEvaluator(const sunsky::Partition& partition, std::size_t k) : partition_(partition), k_(k) {
        if (k < 1) throw InvalidArgument("gap fraction needs k >= 1");
        for (std::size_t zi = 0; zi < partition.n_zenith; ++zi) {
            const auto b = partition.bounds(zi, 0);
            for (std::size_t j = 0; j < k; ++j) elevations_.push_back(90.0 - lattice_value(b.zenith_lo, b.zenith_hi, j, k));
        }
        for (std::size_t t = 1; t < elevations_.size(); ++t) {
            if (elevations_[t] > elevations_[t - 1]) monotone_ = false;
        }
        for (std::size_t ai = 0; ai < partition.n_azimuth; ++ai) {
            const auto b = partition.bounds(0, ai);
            for (std::size_t i = 0; i < k; ++i) azimuths_.push_back(lattice_value(b.azimuth_lo, b.azimuth_hi, i, k));
        }
    }

    const sunsky::Partition& partition() const noexcept { return partition_; }
    std::size_t subsamples() const noexcept { return k_; }

    /// Writes partition.size() fractions, zenith-major.
    void evaluate(const HorizonProfile& profile, std::vector<double>& gaps) const {
        const std::size_t nz = partition_.n_zenith, na = partition_.n_azimuth;
        gaps.assign(nz * na, 0.0);
        const double denom = static_cast<double>(k_ * k_);
        if (!monotone_) {
            for (std::size_t zi = 0; zi < nz; ++zi)
                for (std::size_t ai = 0; ai < na; ++ai)
                    gaps[zi * na + ai] = gap_fraction(profile, partition_.bounds(zi, ai), k_);
            return;
        }
        for (std::size_t ai = 0; ai < na; ++ai) {
            for (std::size_t i = 0; i < k_; ++i) {
                const double h = profile.angle_at(azimuths_[ai * k_ + i]);
                const auto it = std::partition_point(elevations_.begin(), elevations_.end(), [h](double e) { return e > h; });
                std::size_t open = static_cast<std::size_t>(it - elevations_.begin());
                for (std::size_t zi = 0; zi < nz && open > 0; ++zi) {
                    const std::size_t take = std::min(open, k_);
                    gaps[zi * na + ai] += static_cast<double>(take);
                    open -= take;
                }
            }
        }
        for (double& g : gaps) g /= denom;
    }

private:
    sunsky::Partition partition_;
    std::size_t k_;
    std::vector<double> elevations_;
    std::vector<double> azimuths_;
    bool monotone_ = true;
};

/// Horizon cache, one CSV line per cell: row,col,angle_0,...,angle_{N-1}.
inline void write_horizon_cache(const std::string& path, const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                                const std::vector<HorizonProfile>& profiles) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(path + ": cannot open for writing");
    out.precision(17);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out << cells[i].first << ',' << cells[i].second;
        for (double a : profiles[i].angles_deg) out << ',' << a;
        out << '\n';
    }
    if (!out) throw Error(path + ": write failed");
}

struct HorizonCacheEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    HorizonProfile profile;
};

inline std::vector<HorizonCacheEntry> read_horizon_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open");
    std::vector<HorizonCacheEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) {
            try {
                vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw FormatError(path + ":" + std::to_string(line_no) + ": invalid number '" + tok + "'");
            }
        }
        if (vals.size() < 10) throw FormatError(path + ":" + std::to_string(line_no) + ": too few fields");
        HorizonCacheEntry e;
        e.row = static_cast<std::size_t>(vals[0]);
        e.col = static_cast<std::size_t>(vals[1]);
        e.profile.angles_deg.assign(vals.begin() + 2, vals.end());
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace roofsolar::horizon
