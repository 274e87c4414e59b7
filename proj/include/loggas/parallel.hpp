#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace loggas {

// Deterministic parallel loop: [0, n) is split into fixed contiguous chunks and
// fn(i) is called for every index. Each index's work is independent and any
// reduction happens in index order outside this helper, so results are
// bit-identical for every thread count (including 1).
inline void parallel_for(std::size_t n, unsigned thread_count, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = std::max(1u, thread_count);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, w, &fn, &errs] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace loggas
