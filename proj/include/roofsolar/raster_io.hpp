// SPDX-License-Identifier: Apache-2.0
#pragma once

// Raster persistence: single-band GeoTIFF (via libtiff) and ESRI ASCII grids.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <tiffio.h>

#include "roofsolar/crs.hpp"
#include "roofsolar/grid.hpp"

namespace roofsolar::io {

namespace fs = std::filesystem;

enum class RasterFormat { GeoTiff, AsciiGrid };
enum class SampleType { Float32, Float64 };
enum class Compression { None, Deflate };

struct WriteOptions {
    SampleType sample = SampleType::Float64;
    Compression compression = Compression::None;
};

/// Header-level description of a raster file.
struct RasterInfo {
    GridGeometry geometry;
    double nodata = kDefaultNodata;
    bool has_nodata = false;
    int bands = 1;
};

namespace detail {

inline constexpr ttag_t kModelPixelScale = 33550;
inline constexpr ttag_t kModelTiepoint = 33922;
inline constexpr ttag_t kModelTransformation = 34264;
inline constexpr ttag_t kGeoKeyDirectory = 34735;
inline constexpr ttag_t kGeoDoubleParams = 34736;
inline constexpr ttag_t kGeoAsciiParams = 34737;
inline constexpr ttag_t kGdalNodata = 42113;

inline constexpr std::uint16_t kGTModelType = 1024;
inline constexpr std::uint16_t kGTRasterType = 1025;
inline constexpr std::uint16_t kGTCitation = 1026;
inline constexpr std::uint16_t kGeographicType = 2048;
inline constexpr std::uint16_t kProjectedCSType = 3072;

inline TIFFExtendProc& parent_extender() {
    static TIFFExtendProc parent = nullptr;
    return parent;
}

inline void geotiff_tag_extender(TIFF* tif) {
    static const TIFFFieldInfo fields[] = {
        {kModelPixelScale, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1, const_cast<char*>("ModelPixelScaleTag")},
        {kModelTiepoint, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1, const_cast<char*>("ModelTiepointTag")},
        {kModelTransformation, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1, const_cast<char*>("ModelTransformationTag")},
        {kGeoKeyDirectory, -1, -1, TIFF_SHORT, FIELD_CUSTOM, 1, 1, const_cast<char*>("GeoKeyDirectoryTag")},
        {kGeoDoubleParams, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1, const_cast<char*>("GeoDoubleParamsTag")},
        {kGeoAsciiParams, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0, const_cast<char*>("GeoAsciiParamsTag")},
        {kGdalNodata, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0, const_cast<char*>("GDALNoDataValue")},
    };
    TIFFMergeFieldInfo(tif, fields, sizeof(fields) / sizeof(fields[0]));
    if (parent_extender()) parent_extender()(tif);
}

inline void register_geotiff_tags() {
    static std::once_flag once;
    std::call_once(once, [] {
        parent_extender() = TIFFSetTagExtender(geotiff_tag_extender);
        // Unknown private tags in third-party files are common and harmless.
        TIFFSetWarningHandler(nullptr);
    });
}

struct TiffCloser {
    void operator()(TIFF* t) const noexcept {
        if (t) TIFFClose(t);
    }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

inline fs::path prj_path(const fs::path& p) {
    fs::path out = p;
    out.replace_extension(".prj");
    return out;
}

struct TiffLayout {
    std::uint32_t width = 0, height = 0;
    std::uint16_t spp = 1, bits = 0, sample_format = SAMPLEFORMAT_UINT, planar = PLANARCONFIG_CONTIG;
};

inline TiffLayout read_layout(TIFF* tif) {
    TiffLayout l;
    TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &l.width);
    TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &l.height);
    TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLESPERPIXEL, &l.spp);
    TIFFGetFieldDefaulted(tif, TIFFTAG_BITSPERSAMPLE, &l.bits);
    TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLEFORMAT, &l.sample_format);
    TIFFGetFieldDefaulted(tif, TIFFTAG_PLANARCONFIG, &l.planar);
    return l;
}

inline RasterInfo read_tiff_info(TIFF* tif, const std::string& path) {
    RasterInfo info;
    const TiffLayout l = read_layout(tif);
    info.bands = l.spp;
    if (l.spp != 1) throw FormatError(path + ": multi-band raster (" + std::to_string(l.spp) + " bands) not supported");
    if (l.width == 0 || l.height == 0) throw FormatError(path + ": empty raster");
    info.geometry.cols = l.width;
    info.geometry.rows = l.height;

    std::uint16_t count = 0;
    double* scale = nullptr;
    double* tie = nullptr;
    double* xform = nullptr;
    bool pixel_is_point = false;

    std::uint16_t nkeys_count = 0;
    std::uint16_t* keys = nullptr;
    if (TIFFGetField(tif, kGeoKeyDirectory, &nkeys_count, &keys) && keys && nkeys_count >= 4) {
        const std::uint16_t nkeys = keys[3];
        char* ascii = nullptr;
        TIFFGetField(tif, kGeoAsciiParams, &ascii);
        for (std::uint16_t k = 0; k < nkeys && 4u + 4u * k + 3u < nkeys_count; ++k) {
            const std::uint16_t* e = keys + 4 + 4 * k;
            if (e[0] == kGTRasterType && e[1] == 0 && e[3] == 2) pixel_is_point = true;
            if ((e[0] == kProjectedCSType || e[0] == kGeographicType) && e[1] == 0 && e[3] != 32767 && e[3] != 0) {
                info.geometry.crs_id = "EPSG:" + std::to_string(e[3]);
            }
            if (e[0] == kGTCitation && e[1] == kGeoAsciiParams && ascii && info.geometry.crs_id.empty()) {
                const std::size_t len = std::strlen(ascii);
                if (e[3] < len) {
                    std::string text(ascii + e[3], std::min<std::size_t>(e[2], len - e[3]));
                    while (!text.empty() && (text.back() == '|' || text.back() == '\0')) text.pop_back();
                    info.geometry.crs_id = text;
                }
            }
        }
    }

    double sx = 0, sy = 0, ox = 0, oy = 0;
    if (TIFFGetField(tif, kModelPixelScale, &count, &scale) && count >= 2 && TIFFGetField(tif, kModelTiepoint, &count, &tie) &&
        count >= 6) {
        sx = scale[0];
        sy = scale[1];
        ox = tie[3] - tie[0] * sx;
        oy = tie[4] + tie[1] * sy;
    } else if (TIFFGetField(tif, kModelTransformation, &count, &xform) && count >= 16) {
        if (xform[1] != 0.0 || xform[4] != 0.0) throw FormatError(path + ": rotated rasters not supported");
        sx = xform[0];
        sy = -xform[5];
        ox = xform[3];
        oy = xform[7];
    } else {
        throw FormatError(path + ": missing georeference (no ModelPixelScale/ModelTiepoint or ModelTransformation)");
    }
    if (!(sx > 0) || !(sy > 0)) throw FormatError(path + ": raster must be north-up with positive pixel size");
    if (std::abs(sx - sy) > 1e-9 * std::max(sx, sy)) {
        throw FormatError(path + ": non-square pixels (" + format_double(sx) + " x " + format_double(sy) + ")");
    }
    if (pixel_is_point) {
        ox -= 0.5 * sx;
        oy += 0.5 * sy;
    }
    info.geometry.cell_size = sx;
    info.geometry.origin_x = ox;
    info.geometry.origin_y = oy;

    char* nodata_text = nullptr;
    if (TIFFGetField(tif, kGdalNodata, &nodata_text) && nodata_text) {
        info.nodata = std::strtod(nodata_text, nullptr);
        info.has_nodata = true;
        if (l.sample_format == SAMPLEFORMAT_IEEEFP && l.bits == 32) info.nodata = static_cast<float>(info.nodata);
    }
    return info;
}

template <typename T>
void convert_row(const unsigned char* src, std::size_t n, double* dst) {
    for (std::size_t i = 0; i < n; ++i) {
        T v;
        std::memcpy(&v, src + i * sizeof(T), sizeof(T));
        dst[i] = static_cast<double>(v);
    }
}

inline void convert_samples(const TiffLayout& l, const unsigned char* src, std::size_t n, double* dst,
                            const std::string& path) {
    switch (l.sample_format) {
    case SAMPLEFORMAT_IEEEFP:
        if (l.bits == 32) return convert_row<float>(src, n, dst);
        if (l.bits == 64) return convert_row<double>(src, n, dst);
        break;
    case SAMPLEFORMAT_INT:
        if (l.bits == 8) return convert_row<std::int8_t>(src, n, dst);
        if (l.bits == 16) return convert_row<std::int16_t>(src, n, dst);
        if (l.bits == 32) return convert_row<std::int32_t>(src, n, dst);
        break;
    case SAMPLEFORMAT_UINT:
        if (l.bits == 8) return convert_row<std::uint8_t>(src, n, dst);
        if (l.bits == 16) return convert_row<std::uint16_t>(src, n, dst);
        if (l.bits == 32) return convert_row<std::uint32_t>(src, n, dst);
        break;
    default:
        break;
    }
    throw FormatError(path + ": unsupported sample type (format " + std::to_string(l.sample_format) + ", " +
                      std::to_string(l.bits) + " bits)");
}

inline TiffHandle open_tiff(const std::string& path, const char* mode) {
    register_geotiff_tags();
    TiffHandle tif(TIFFOpen(path.c_str(), mode));
    if (!tif) throw FormatError(path + ": cannot open as TIFF");
    return tif;
}

inline Grid read_geotiff(const std::string& path) {
    auto tif = open_tiff(path, "r");
    const RasterInfo info = read_tiff_info(tif.get(), path);
    const TiffLayout l = read_layout(tif.get());
    Grid grid(info.geometry, info.nodata, 0.0);
    const std::size_t bytes_per_sample = l.bits / 8;
    auto out = grid.values();

    if (TIFFIsTiled(tif.get())) {
        std::uint32_t tw = 0, th = 0;
        TIFFGetField(tif.get(), TIFFTAG_TILEWIDTH, &tw);
        TIFFGetField(tif.get(), TIFFTAG_TILELENGTH, &th);
        std::vector<unsigned char> tile(TIFFTileSize(tif.get()));
        std::vector<double> converted(static_cast<std::size_t>(tw));
        for (std::uint32_t y0 = 0; y0 < l.height; y0 += th) {
            for (std::uint32_t x0 = 0; x0 < l.width; x0 += tw) {
                if (TIFFReadTile(tif.get(), tile.data(), x0, y0, 0, 0) < 0) {
                    throw FormatError(path + ": failed to read tile");
                }
                const std::uint32_t w = std::min(tw, l.width - x0);
                for (std::uint32_t ty = 0; ty < th && y0 + ty < l.height; ++ty) {
                    convert_samples(l, tile.data() + static_cast<std::size_t>(ty) * tw * bytes_per_sample, w,
                                    converted.data(), path);
                    std::copy_n(converted.begin(), w, out.begin() + (static_cast<std::size_t>(y0 + ty) * l.width + x0));
                }
            }
        }
    } else {
        std::vector<unsigned char> line(TIFFScanlineSize(tif.get()));
        for (std::uint32_t r = 0; r < l.height; ++r) {
            if (TIFFReadScanline(tif.get(), line.data(), r, 0) < 0) {
                throw FormatError(path + ": failed to read row " + std::to_string(r));
            }
            convert_samples(l, line.data(), l.width, out.data() + static_cast<std::size_t>(r) * l.width, path);
        }
    }
    return grid;
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline double parse_number(const std::string& tok, const std::string& path) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw FormatError(path + ": invalid number '" + tok + "'");
    return v;
}

inline RasterInfo read_ascii_header(std::istream& in, const std::string& path) {
    RasterInfo info;
    std::optional<double> ncols, nrows, xll, yll, cellsize, dx, dy;
    bool center = false;
    std::optional<double> nodata;
    // Header lines start with a keyword; the first numeric line starts the body.
    while (true) {
        const auto pos = in.tellg();
        std::string line;
        if (!std::getline(in, line)) break;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (!std::isalpha(static_cast<unsigned char>(toks[0][0]))) {
            in.seekg(pos);
            break;
        }
        if (toks.size() < 2) throw FormatError(path + ": malformed header line '" + line + "'");
        const std::string key = lower(toks[0]);
        const double v = parse_number(toks[1], path);
        if (key == "ncols") ncols = v;
        else if (key == "nrows") nrows = v;
        else if (key == "xllcorner") xll = v;
        else if (key == "yllcorner") yll = v;
        else if (key == "xllcenter") { xll = v; center = true; }
        else if (key == "yllcenter") { yll = v; center = true; }
        else if (key == "cellsize") cellsize = v;
        else if (key == "dx") dx = v;
        else if (key == "dy") dy = v;
        else if (key == "nodata_value") nodata = v;
        else throw FormatError(path + ": unknown header key '" + toks[0] + "'");
    }
    if (!ncols || !nrows) throw FormatError(path + ": missing ncols/nrows");
    if (!xll || !yll) throw FormatError(path + ": missing georeference (xllcorner/yllcorner)");
    if (!cellsize) {
        if (!dx || !dy) throw FormatError(path + ": missing cellsize");
        if (*dx != *dy) throw FormatError(path + ": non-square pixels (dx != dy)");
        cellsize = dx;
    }
    if (*ncols < 1 || *nrows < 1 || *ncols != std::floor(*ncols) || *nrows != std::floor(*nrows)) {
        throw FormatError(path + ": invalid raster dimensions");
    }
    if (!(*cellsize > 0)) throw FormatError(path + ": cellsize must be positive");
    info.geometry.cols = static_cast<std::size_t>(*ncols);
    info.geometry.rows = static_cast<std::size_t>(*nrows);
    info.geometry.cell_size = *cellsize;
    const double half = center ? 0.5 * *cellsize : 0.0;
    info.geometry.origin_x = *xll - half;
    info.geometry.origin_y = *yll - half + static_cast<double>(info.geometry.rows) * *cellsize;
    info.has_nodata = nodata.has_value();
    info.nodata = nodata.value_or(kDefaultNodata);
    return info;
}

inline std::string read_prj(const fs::path& path) {
    std::ifstream prj(prj_path(path));
    if (!prj) return {};
    std::stringstream ss;
    ss << prj.rdbuf();
    std::string s = ss.str();
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

inline Grid read_ascii(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open");
    RasterInfo info = read_ascii_header(in, path);
    info.geometry.crs_id = read_prj(path);
    std::vector<double> values;
    values.reserve(info.geometry.size());
    std::string tok;
    while (in >> tok) {
        if (values.size() == info.geometry.size()) throw FormatError(path + ": more values than nrows*ncols");
        values.push_back(parse_number(tok, path));
    }
    if (values.size() != info.geometry.size()) {
        throw FormatError(path + ": expected " + std::to_string(info.geometry.size()) + " values, found " +
                          std::to_string(values.size()));
    }
    return Grid(info.geometry, info.nodata, std::move(values));
}

inline bool has_tiff_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    if (!in.read(magic, 4)) return false;
    return (magic[0] == 'I' && magic[1] == 'I') || (magic[0] == 'M' && magic[1] == 'M');
}

} // namespace detail

inline RasterFormat format_for_path(const fs::path& path) {
    const std::string ext = detail::lower(path.extension().string());
    if (ext == ".asc" || ext == ".txt" || ext == ".grd") return RasterFormat::AsciiGrid;
    return RasterFormat::GeoTiff;
}

/// Streams rows of a single-band GeoTIFF to disk. Rows must be written in
/// order, top to bottom; the file is finalized by `close()` or destruction.
class GeoTiffWriter {
public:
    GeoTiffWriter(const fs::path& path, const GridGeometry& geometry, double nodata, WriteOptions options = {})
        : path_(path.string()), geometry_(geometry), options_(options) {
        geometry_.validate();
        tif_ = detail::open_tiff(path_, "w");
        TIFF* t = tif_.get();
        const std::uint16_t bits = options.sample == SampleType::Float32 ? 32 : 64;
        TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(geometry.cols));
        TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(geometry.rows));
        TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, 1);
        TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, bits);
        TIFFSetField(t, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_IEEEFP);
        TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
        TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
        if (options.compression == Compression::Deflate) {
            if (!TIFFIsCODECConfigured(COMPRESSION_ADOBE_DEFLATE)) throw Error("libtiff built without deflate support");
            TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_ADOBE_DEFLATE);
        } else {
            TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
        }
        TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(t, 0));

        const double scale[3] = {geometry.cell_size, geometry.cell_size, 0.0};
        const double tie[6] = {0.0, 0.0, 0.0, geometry.origin_x, geometry.origin_y, 0.0};
        TIFFSetField(t, detail::kModelPixelScale, 3, scale);
        TIFFSetField(t, detail::kModelTiepoint, 6, tie);

        std::vector<std::uint16_t> keys = {1, 1, 0, 0};
        auto add_key = [&](std::uint16_t id, std::uint16_t loc, std::uint16_t count, std::uint16_t value) {
            keys.insert(keys.end(), {id, loc, count, value});
            ++keys[3];
        };
        std::string citation;
        const auto code = crs::epsg_code(geometry.crs_id);
        const bool geographic = crs::is_geographic(geometry.crs_id);
        add_key(detail::kGTModelType, 0, 1, geographic ? 2 : 1);
        add_key(detail::kGTRasterType, 0, 1, 1);
        if (code && *code > 0 && *code < 32767) {
            add_key(geographic ? detail::kGeographicType : detail::kProjectedCSType, 0, 1,
                    static_cast<std::uint16_t>(*code));
        } else if (!geometry.crs_id.empty()) {
            citation = geometry.crs_id + "|";
            add_key(detail::kGTCitation, static_cast<std::uint16_t>(detail::kGeoAsciiParams),
                    static_cast<std::uint16_t>(citation.size()), 0);
        }
        TIFFSetField(t, detail::kGeoKeyDirectory, static_cast<std::uint16_t>(keys.size()), keys.data());
        if (!citation.empty()) TIFFSetField(t, detail::kGeoAsciiParams, citation.c_str());
        const std::string nd = detail::format_double(nodata);
        TIFFSetField(t, detail::kGdalNodata, nd.c_str());
        scratch_.resize(geometry.cols * (bits / 8));
    }

    GeoTiffWriter(const GeoTiffWriter&) = delete;
    GeoTiffWriter& operator=(const GeoTiffWriter&) = delete;
    ~GeoTiffWriter() {
        if (tif_) TIFFClose(tif_.release());
    }

    void write_row(std::span<const double> row) {
        if (!tif_) throw Error(path_ + ": writer already closed");
        if (row.size() != geometry_.cols) throw InvalidArgument(path_ + ": row width mismatch");
        if (next_row_ >= geometry_.rows) throw InvalidArgument(path_ + ": too many rows");
        if (options_.sample == SampleType::Float32) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                const float v = static_cast<float>(row[i]);
                std::memcpy(scratch_.data() + i * sizeof(float), &v, sizeof(float));
            }
        } else {
            std::memcpy(scratch_.data(), row.data(), row.size() * sizeof(double));
        }
        if (TIFFWriteScanline(tif_.get(), scratch_.data(), static_cast<std::uint32_t>(next_row_), 0) < 0) {
            throw Error(path_ + ": write failed at row " + std::to_string(next_row_));
        }
        ++next_row_;
    }

    void close() {
        if (!tif_) return;
        if (next_row_ != geometry_.rows) throw Error(path_ + ": closed after " + std::to_string(next_row_) + " rows");
        TIFF* t = tif_.release();
        const bool ok = TIFFFlush(t) == 1;
        TIFFClose(t);
        if (!ok) throw Error(path_ + ": flush failed");
    }

private:
    std::string path_;
    GridGeometry geometry_;
    WriteOptions options_;
    detail::TiffHandle tif_;
    std::vector<unsigned char> scratch_;
    std::size_t next_row_ = 0;
};

/// Header-only inspection; does not load cell values.
inline RasterInfo read_raster_info(const fs::path& path) {
    const std::string p = path.string();
    if (!fs::exists(path)) throw FormatError(p + ": file not found");
    if (detail::has_tiff_magic(p)) {
        auto tif = detail::open_tiff(p, "r");
        std::uint16_t spp = 1;
        TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
        RasterInfo info = detail::read_tiff_info(tif.get(), p);
        return info;
    }
    std::ifstream in(p);
    RasterInfo info = detail::read_ascii_header(in, p);
    info.geometry.crs_id = detail::read_prj(path);
    return info;
}

inline Grid read_raster(const fs::path& path) {
    const std::string p = path.string();
    if (!fs::exists(path)) throw FormatError(p + ": file not found");
    if (detail::has_tiff_magic(p)) return detail::read_geotiff(p);
    return detail::read_ascii(p);
}

inline void write_ascii(const Grid& grid, const fs::path& path) {
    const std::string p = path.string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(p + ": cannot open for writing");
    const auto& g = grid.geometry();
    out << "ncols " << g.cols << "\n"
        << "nrows " << g.rows << "\n"
        << "xllcorner " << detail::format_double(g.origin_x) << "\n"
        << "yllcorner " << detail::format_double(g.origin_y - g.height()) << "\n"
        << "cellsize " << detail::format_double(g.cell_size) << "\n"
        << "NODATA_value " << detail::format_double(grid.nodata()) << "\n";
    for (std::size_t r = 0; r < g.rows; ++r) {
        const auto row = grid.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ' ';
            out << detail::format_double(row[c]);
        }
        out << '\n';
    }
    if (!out) throw Error(p + ": write failed");
    const fs::path prj = detail::prj_path(path);
    if (!g.crs_id.empty()) {
        std::ofstream pf(prj, std::ios::trunc);
        pf << g.crs_id << "\n";
        if (!pf) throw Error(prj.string() + ": write failed");
    } else if (fs::exists(prj)) {
        fs::remove(prj);
    }
}

inline void write_raster(const Grid& grid, const fs::path& path, WriteOptions options = {}) {
    if (format_for_path(path) == RasterFormat::AsciiGrid) return write_ascii(grid, path);
    GeoTiffWriter writer(path, grid.geometry(), grid.nodata(), options);
    for (std::size_t r = 0; r < grid.rows(); ++r) writer.write_row(grid.row(r));
    writer.close();
}

} // namespace roofsolar::io
