#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace hedgelab {

// Process-wide cap on worker threads used by path loops. Results never depend
// on it: workers write disjoint per-path slots and reductions run sequentially
// afterwards.
inline std::atomic<int>& max_threads_setting() {
    static std::atomic<int> v{0};  // 0 = hardware concurrency
    return v;
}

inline void set_max_threads(int n) { max_threads_setting().store(n); }

inline int effective_threads(std::size_t work_items) {
    int n = max_threads_setting().load();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (static_cast<std::size_t>(n) > work_items) n = static_cast<int>(work_items);
    return n < 1 ? 1 : n;
}

// Runs fn(i) for i in [0, n) split across threads in contiguous blocks.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int nt = effective_threads(n);
    if (nt == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace hedgelab
