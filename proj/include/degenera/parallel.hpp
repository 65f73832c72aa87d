#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace degenera {

/// Worker count: DEGENERA_THREADS if set, else 1.  Results are bit-identical
/// for every thread count because chunks are merged in ascending cell order.
inline int configured_threads() {
    const char* env = std::getenv("DEGENERA_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    if (n < 1) n = 1;
    if (n > 16) n = 16;
    return n;
}

/// Static chunking of [0, n): fn(chunk_index, begin, end).  Chunk boundaries
/// do not depend on the thread count's scheduling, only on its value.
inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    if (threads <= 1 || n < 64) {
        fn(0, 0, n);
        return;
    }
    std::size_t per = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        std::size_t b = t * per, e = std::min(n, b + per);
        if (b >= e) break;
        pool.emplace_back(fn, t, b, e);
    }
    for (auto& th : pool) th.join();
}

} // namespace degenera
