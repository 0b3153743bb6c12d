#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace macfe {

// Runs fn(i) for i in [0, n). With threads <= 1 this is a plain loop; above
// that, indices are statically chunked across workers. Callers write results
// into per-index slots, so the merge order (and therefore every downstream
// byte) is independent of the thread count.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(n, threads <= 1 ? 1 : static_cast<std::size_t>(threads));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace macfe
