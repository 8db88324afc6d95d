// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace roofsolar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input data.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Parameter outside the contract of an operation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two rasters (or raster and vector data) that should line up do not.
class GeometryMismatch : public Error {
public:
    using Error::Error;
};

inline constexpr double kDefaultNodata = -9999.0;

/// Placement of a north-up raster with square cells. The origin is the
/// upper-left corner of the upper-left cell.
struct GridGeometry {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double cell_size = 1.0;
    std::string crs_id;

    std::size_t size() const noexcept { return rows * cols; }
    double cell_area() const noexcept { return cell_size * cell_size; }
    double center_x(std::size_t col) const noexcept { return origin_x + (static_cast<double>(col) + 0.5) * cell_size; }
    double center_y(std::size_t row) const noexcept { return origin_y - (static_cast<double>(row) + 0.5) * cell_size; }
    double width() const noexcept { return static_cast<double>(cols) * cell_size; }
    double height() const noexcept { return static_cast<double>(rows) * cell_size; }

    void validate() const {
        if (rows < 1 || cols < 1) throw InvalidArgument("grid must have at least one row and one column");
        if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw InvalidArgument("grid cell size must be positive");
    }

    friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

inline void require_same_geometry(const GridGeometry& a, const GridGeometry& b, const char* what) {
    if (a.rows != b.rows || a.cols != b.cols || a.origin_x != b.origin_x || a.origin_y != b.origin_y ||
        a.cell_size != b.cell_size) {
        throw GeometryMismatch(std::string(what) + ": grid geometry mismatch");
    }
}

/// Single-band raster of doubles with a nodata sentinel, row-major, north-up.
class Grid {
public:
    Grid() = default;

    Grid(GridGeometry geometry, double nodata = kDefaultNodata, double fill = 0.0)
        : geometry_(std::move(geometry)), nodata_(nodata) {
        geometry_.validate();
        values_.assign(geometry_.size(), fill);
    }

    Grid(GridGeometry geometry, double nodata, std::vector<double> values)
        : geometry_(std::move(geometry)), nodata_(nodata), values_(std::move(values)) {
        geometry_.validate();
        if (values_.size() != geometry_.size()) throw InvalidArgument("grid value count does not match rows*cols");
    }

    /// Same geometry and nodata as `like`, every cell set to `fill`.
    static Grid like(const Grid& other, double fill) { return Grid(other.geometry_, other.nodata_, fill); }

    const GridGeometry& geometry() const noexcept { return geometry_; }
    std::size_t rows() const noexcept { return geometry_.rows; }
    std::size_t cols() const noexcept { return geometry_.cols; }
    double cell_size() const noexcept { return geometry_.cell_size; }
    double nodata() const noexcept { return nodata_; }
    void set_crs(std::string crs) { geometry_.crs_id = std::move(crs); }

    double& at(std::size_t row, std::size_t col) noexcept { return values_[row * geometry_.cols + col]; }
    double at(std::size_t row, std::size_t col) const noexcept { return values_[row * geometry_.cols + col]; }

    bool is_nodata(double v) const noexcept { return v == nodata_ || std::isnan(v); }
    bool valid(std::size_t row, std::size_t col) const noexcept { return !is_nodata(at(row, col)); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> row(std::size_t r) const noexcept {
        return std::span<const double>(values_).subspan(r * geometry_.cols, geometry_.cols);
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    GridGeometry geometry_;
    double nodata_ = kDefaultNodata;
    std::vector<double> values_;
};

/// Integer building labels aligned with a reference grid; 0 means no building.
/// Label `k` belongs to the footprint `ids[k - 1]`.
struct ZoneGrid {
    GridGeometry geometry;
    std::vector<std::int32_t> labels;
    std::vector<std::string> ids;
    std::size_t overlapping_cells = 0;

    std::int32_t at(std::size_t row, std::size_t col) const noexcept { return labels[row * geometry.cols + col]; }
    std::size_t zone_count() const noexcept { return ids.size(); }
};

} // namespace roofsolar
