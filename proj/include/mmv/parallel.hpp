#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace mmv {

/// Runs body(lo, hi) over a static partition of [begin, end) into at most
/// `workers` contiguous blocks. The partition depends only on the range and
/// worker count, and blocks must write disjoint outputs, so results do not
/// depend on scheduling. The first exception thrown by any block is rethrown.
template <typename Index, typename Body>
void parallel_for(Index begin, Index end, int workers, Body&& body) {
    const Index total = end - begin;
    if (total <= 0) {
        return;
    }
    const Index blocks = std::clamp<Index>(static_cast<Index>(workers), 1, total);
    if (blocks == 1) {
        body(begin, end);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(blocks));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(blocks));
    for (Index b = 0; b < blocks; ++b) {
        const Index lo = begin + total * b / blocks;
        const Index hi = begin + total * (b + 1) / blocks;
        pool.emplace_back([&, lo, hi, b] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(b)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace mmv
