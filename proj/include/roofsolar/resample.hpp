// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>

#include "roofsolar/grid.hpp"

namespace roofsolar {

enum class Aggregate { Mean, Min, Max };

inline Aggregate parse_aggregate(std::string_view s) {
    if (s == "mean") return Aggregate::Mean;
    if (s == "min") return Aggregate::Min;
    if (s == "max") return Aggregate::Max;
    throw InvalidArgument("unknown aggregation method '" + std::string(s) + "' (expected mean|min|max)");
}

/// Block-aggregates `factor` x `factor` cells into one, skipping nodata.
/// Edge blocks that do not fill a whole block aggregate what is available.
inline Grid downsample(const Grid& grid, std::size_t factor, Aggregate method) {
    if (factor < 2) throw InvalidArgument("downsample factor must be at least 2");
    if (factor > grid.rows() && factor > grid.cols()) {
        throw InvalidArgument("downsample factor " + std::to_string(factor) + " exceeds both grid dimensions");
    }
    GridGeometry g = grid.geometry();
    g.rows = (grid.rows() + factor - 1) / factor;
    g.cols = (grid.cols() + factor - 1) / factor;
    g.cell_size *= static_cast<double>(factor);
    Grid out(g, grid.nodata(), grid.nodata());
    for (std::size_t r = 0; r < g.rows; ++r) {
        for (std::size_t c = 0; c < g.cols; ++c) {
            double acc = method == Aggregate::Min   ? std::numeric_limits<double>::infinity()
                         : method == Aggregate::Max ? -std::numeric_limits<double>::infinity()
                                                    : 0.0;
            std::size_t n = 0;
            const std::size_t re = std::min(grid.rows(), (r + 1) * factor);
            const std::size_t ce = std::min(grid.cols(), (c + 1) * factor);
            for (std::size_t rr = r * factor; rr < re; ++rr) {
                for (std::size_t cc = c * factor; cc < ce; ++cc) {
                    const double v = grid.at(rr, cc);
                    if (grid.is_nodata(v)) continue;
                    ++n;
                    if (method == Aggregate::Mean) acc += v;
                    else if (method == Aggregate::Min) acc = std::min(acc, v);
                    else acc = std::max(acc, v);
                }
            }
            if (n == 0) continue;
            out.at(r, c) = method == Aggregate::Mean ? acc / static_cast<double>(n) : acc;
        }
    }
    return out;
}

} // namespace roofsolar
