#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace esac {

/// Resolve a requested worker count: 0 means "use available parallelism".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [0, count) on up to `threads` workers.
///
/// Work is split into contiguous blocks. Callers must make fn(i) write only
/// to slot i of a pre-sized buffer; results are then independent of the
/// worker count and of scheduling order.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::min(resolve_threads(threads), std::max(count, 1));
    if (count <= 0) return;
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads) - 1);
    const int block = (count + threads - 1) / threads;
    auto run_block = [&fn, count](int begin, int end) {
        end = std::min(end, count);
        for (int i = begin; i < end; ++i) fn(i);
    };
    for (int w = 1; w < threads; ++w) {
        workers.emplace_back(run_block, w * block, (w + 1) * block);
    }
    run_block(0, block);
    for (auto& t : workers) t.join();
}

} // namespace esac
