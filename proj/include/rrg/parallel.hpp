#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rrg {

// Threads requested by the caller; 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on a small worker pool. Each index is handled
// exactly once; results must be written to per-index slots so that the output
// does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) {
                        return;
                    }
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// Maps replica indices to results, in index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
    std::vector<T> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace rrg
