// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace roofsolar {

/// Number of worker threads to use when the caller asked for `requested`
/// (0 = hardware concurrency).
inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `body(begin, end)` over contiguous row blocks on up to `workers`
/// threads. Blocks are handed out statically, so each row is processed by
/// exactly one call regardless of worker count. The first exception thrown
/// by any block is rethrown on the calling thread.
template <typename Body>
void parallel_rows(std::size_t rows, unsigned workers, Body&& body) {
    workers = std::max(1u, workers);
    if (workers == 1 || rows < 2) {
        body(std::size_t{0}, rows);
        return;
    }
    // Interleaved small blocks balance uneven per-row cost.
    const std::size_t block = std::max<std::size_t>(1, rows / (static_cast<std::size_t>(workers) * 8));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t b = static_cast<std::size_t>(w) * block; b < rows; b += block * workers) {
                    body(b, std::min(rows, b + block));
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace roofsolar
