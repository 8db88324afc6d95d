// SPDX-License-Identifier: Apache-2.0
// Streams a 12000 x 12000 float32 deflate GeoTIFF row by row and checks that
// peak memory stays far below the size of the full raster.

#include <sys/resource.h>

#include <vector>

#include <gtest/gtest.h>

#include "roofsolar/raster_io.hpp"
#include "test_support.hpp"

using namespace roofsolar;

namespace {

long peak_rss_kb() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return u.ru_maxrss;
}

} // namespace

TEST(LargeRaster, StreamedWriteStaysSmall) {
    constexpr std::size_t n = 12000;
    const auto dir = testsupport::scratch_dir();
    const GridGeometry g{n, n, 250000.0, 2600000.0, 1.0, "EPSG:32643"};
    {
        io::GeoTiffWriter w(dir / "big.tif", g, kDefaultNodata, {io::SampleType::Float32, io::Compression::Deflate});
        std::vector<double> row(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) row[c] = static_cast<double>((r + c) % 97);
            w.write_row(row);
        }
        w.close();
    }
    // The raster as doubles would take 1.15 GB; the streamed writer holds one row.
    EXPECT_LT(peak_rss_kb(), 256 * 1024);
    const auto info = io::read_raster_info(dir / "big.tif");
    EXPECT_EQ(info.geometry, g);
    fs::remove(dir / "big.tif");
}
