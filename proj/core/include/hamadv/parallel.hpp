#pragma once
// Deterministic index-space parallelism: results are keyed by index, so the
// merged output is independent of the thread count.

#include <functional>
#include <thread>
#include <vector>

namespace hamadv {

inline void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

} // namespace hamadv
