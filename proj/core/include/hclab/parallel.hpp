#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace hc {

/// Runs fn(0..n-1) across `threads` workers (serial when threads <= 1).
/// Callers own determinism: results must land in preallocated slots.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::min(threads, n);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace hc
